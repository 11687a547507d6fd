//! Text syntax for observables: a sum of terms `[coef*]kind`, where kind is
//! `unit`, `delta:a,b,c,d` (tag), `cylinder:k1,k2,…` (x-profile) or `slot:c:d`.

use std::collections::BTreeMap;

use gl2_boundary::arith::Rat;
use gl2_boundary::coset::p1_normalize;
use gl2_boundary::qsm::{coef, coef_i64, Observable, QMat2, RhoPattern, SSupport, Term, XProfile};

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.trim().parse::<Rat>().map_err(|_| format!("{s:?} is not a rational number"))
}

pub fn parse_matrix(s: &str) -> Result<QMat2, String> {
    let parts: Vec<Rat> = s.split(',').map(parse_rat).collect::<Result<_, _>>()?;
    let [a, b, c, d]: [Rat; 4] = parts.try_into().map_err(|_| format!("{s:?}: expected four entries a,b,c,d"))?;
    Ok(QMat2([a, b, c, d]))
}

fn term(level: u64, spec: &str) -> Result<Term, String> {
    let (c, kind) = match spec.split_once('*') {
        Some((c, k)) => (coef(parse_rat(c)?), k.trim()),
        None => (coef_i64(1), spec.trim()),
    };
    let plain = |s_support, x_profile| Term { coef: c.clone(), tag: QMat2::identity(), rho: RhoPattern::Any, s_support, x_profile };
    let (name, arg) = kind.split_once(':').unwrap_or((kind, ""));
    match name {
        "unit" if arg.is_empty() => Ok(Term::delta(QMat2::identity(), c)),
        "delta" => {
            let tag = parse_matrix(arg)?;
            if tag.inverse().is_none() {
                return Err(format!("delta tag {arg} is singular"));
            }
            Ok(Term::delta(tag, c))
        }
        "cylinder" => {
            let digits: Vec<u64> = arg.split(',').map(|d| d.trim().parse::<u64>().ok().filter(|&d| d > 0)).collect::<Option<_>>().ok_or_else(|| format!("cylinder digits {arg:?} must be positive integers"))?;
            Ok(plain(SSupport::All(coef_i64(1)), XProfile::Cylinder(digits)))
        }
        "slot" => {
            let (a, b) = arg.split_once(':').ok_or_else(|| format!("slot {arg:?}: expected c:d"))?;
            let (a, b) = (a.trim().parse::<i64>().map_err(|e| e.to_string())?, b.trim().parse::<i64>().map_err(|e| e.to_string())?);
            let s = p1_normalize(level, a, b).map_err(|e| e.to_string())?;
            Ok(plain(SSupport::Map(BTreeMap::from([(s, coef_i64(1))])), XProfile::Const(coef_i64(1))))
        }
        _ => Err(format!("unknown observable term {spec:?}")),
    }
}

pub fn parse_observable(level: u64, spec: &str) -> Result<Observable, String> {
    let terms = spec.split('+').map(|t| term(level, t)).collect::<Result<Vec<_>, _>>()?;
    Observable::terms(level, terms).map_err(|e| e.to_string())
}
