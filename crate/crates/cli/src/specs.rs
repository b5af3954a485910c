//! Parsers for the compact command-line notations.
//!
//! ```text
//! -D 0,2
//! --psi pow:c=1/4,theta=1[,base=12] | log:theta=2,beta=1[,base=3] | table:1/4,1/16,...
//! --A   id | affine:u=2,v=0 | table:1,1,2,3,...
//! --f   s=gamma/2[,c=1]  (or just the exponent)
//! -n    7 | 2..10
//! ```

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::str::FromStr;

use zerofull::cantor::CantorParams;
use zerofull::laws::{DimensionFunctionSpec, GammaAffine, PsiFamily, PsiSpec, SequenceSpec};
use zerofull::Rational;

use crate::CliError;

fn bad(what: &str, text: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("bad {what} `{text}`: {why}"))
}

pub fn number<T: FromStr>(what: &str, text: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    text.trim().parse().map_err(|e| bad(what, text, e))
}

pub fn rational(what: &str, text: &str) -> Result<Rational, CliError> {
    text.trim().parse().map_err(|e| bad(what, text, e))
}

pub fn params(b: &str, digits: &str) -> Result<CantorParams, CliError> {
    let base: u32 = number("base -b", b)?;
    let d = digits
        .split(',')
        .map(|x| number::<u32>("digit set -D", x))
        .collect::<Result<Vec<_>, _>>()?;
    CantorParams::new(base, &d).map_err(CliError::Engine)
}

/// `name:k=v,...` into its name and fields; a bare name has no fields.
fn fields<'a>(what: &str, text: &'a str) -> Result<(&'a str, BTreeMap<&'a str, &'a str>), CliError> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut map = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| bad(what, text, format!("expected key=value, got `{item}`")))?;
        map.insert(k.trim(), v.trim());
    }
    Ok((name.trim(), map))
}

fn take<'a>(map: &mut BTreeMap<&str, &'a str>, key: &str) -> Option<&'a str> {
    map.remove(key)
}

fn finish(what: &str, text: &str, map: BTreeMap<&str, &str>) -> Result<(), CliError> {
    match map.keys().next() {
        None => Ok(()),
        Some(k) => Err(bad(what, text, format!("unknown field `{k}`"))),
    }
}

fn list<T>(what: &str, text: &str, body: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let values: Vec<T> = body.split(',').map(|x| item(x.trim())).collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(bad(what, text, "empty table"));
    }
    Ok(values)
}

pub fn sequence(text: Option<&str>) -> Result<SequenceSpec, CliError> {
    let Some(text) = text else {
        return Ok(SequenceSpec::Identity);
    };
    if let Some(body) = text.strip_prefix("table:") {
        let values = list("--A", text, body, |x| number::<u64>("--A entry", x))?;
        return Ok(SequenceSpec::Table { values });
    }
    let (name, mut map) = fields("--A", text)?;
    let spec = match name {
        "id" | "identity" => SequenceSpec::Identity,
        "affine" => SequenceSpec::Affine {
            slope: rational("--A slope", take(&mut map, "u").ok_or_else(|| bad("--A", text, "missing u"))?)?,
            offset: take(&mut map, "v").map_or(Ok(Rational::zero()), |v| rational("--A offset", v))?,
        },
        other => return Err(bad("--A", text, format!("unknown kind `{other}`"))),
    };
    finish("--A", text, map)?;
    Ok(spec)
}

pub fn psi(text: &str, seq: Option<&str>) -> Result<PsiSpec, CliError> {
    let family = if let Some(body) = text.strip_prefix("table:") {
        PsiFamily::Table {
            values: list("--psi", text, body, |x| rational("--psi entry", x))?,
        }
    } else {
        let (name, mut map) = fields("--psi", text)?;
        let base = take(&mut map, "base").map(|v| number::<u64>("--psi base", v)).transpose()?;
        let theta = rational(
            "--psi theta",
            take(&mut map, "theta").ok_or_else(|| bad("--psi", text, "missing theta"))?,
        )?;
        let family = match name {
            "pow" => PsiFamily::PowerDecay {
                c: take(&mut map, "c").map_or(Ok(Rational::one()), |v| rational("--psi c", v))?,
                theta,
                base,
            },
            "log" => PsiFamily::LogModified {
                theta,
                beta: rational(
                    "--psi beta",
                    take(&mut map, "beta").ok_or_else(|| bad("--psi", text, "missing beta"))?,
                )?,
                base,
            },
            other => return Err(bad("--psi", text, format!("unknown family `{other}`"))),
        };
        finish("--psi", text, map)?;
        family
    };
    PsiSpec::new(family, sequence(seq)?).map_err(CliError::Engine)
}

/// `s=<exponent>[,c=<log power>]`; the exponent may involve `gamma`.
pub fn dimension_function(text: &str) -> Result<DimensionFunctionSpec, CliError> {
    if !text.contains('=') {
        let s: GammaAffine = text.parse().map_err(|e| bad("--f", text, e))?;
        return Ok(DimensionFunctionSpec::power(s));
    }
    let prefixed = format!(":{text}");
    let (_, mut map) = fields("--f", &prefixed)?;
    let s: GammaAffine = take(&mut map, "s")
        .ok_or_else(|| bad("--f", text, "missing s"))?
        .parse()
        .map_err(|e| bad("--f", text, e))?;
    let c = take(&mut map, "c").map_or(Ok(Rational::zero()), |v| rational("--f c", v))?;
    finish("--f", text, map)?;
    Ok(DimensionFunctionSpec::new(s, c))
}

/// `n` or `lo..hi`.
pub fn levels(text: &str) -> Result<RangeInclusive<u32>, CliError> {
    match text.split_once("..") {
        Some((a, b)) => {
            let lo = number("-n", a)?;
            let hi = number("-n", b.trim_start_matches('='))?;
            if lo > hi {
                return Err(bad("-n", text, "empty range"));
            }
            Ok(lo..=hi)
        }
        None => {
            let n = number("-n", text)?;
            Ok(n..=n)
        }
    }
}
