use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::Result;
use crate::eval::EvalPoint;

/// One summand `weight * f(point)` of `T_p f(z_0)`. When `real_part` is set
/// only `Re f(point)` enters, standing for a conjugate pair.
#[derive(Clone, Debug)]
pub struct HeckeTerm {
    pub point: EvalPoint,
    pub weight: Rational,
    pub real_part: bool,
}

/// The points and weights of `T_p f(z0)`: `(p z0, p^{k-1})` when `p ∤ N`,
/// then `((z0 + j)/p, 1/p)` for `j = 0 .. p-1`.
pub fn hecke_points(z0: &EvalPoint, p: u64, level: u64, weight: u32) -> Result<Vec<(EvalPoint, Rational)>> {
    let mut out = Vec::with_capacity(p as usize + 1);
    if level % p != 0 {
        out.push((z0.scaled(p)?, Rational::from(Integer::from(p).pow(weight - 1))));
    }
    let inv = Rational::from((1, p));
    for j in 0..p {
        out.push((z0.hecke_image(j as i64, p)?, inv.clone()));
    }
    Ok(out)
}

/// Like [`hecke_points`], but for purely imaginary `z0` and odd `p` the
/// points `(z0 + j)/p` and `(z0 + p - j)/p` are conjugate mirror images, so
/// only `j <= (p-1)/2` is kept with the real part counted twice.
pub fn hecke_terms(z0: &EvalPoint, p: u64, level: u64, weight: u32) -> Result<Vec<HeckeTerm>> {
    if !(z0.is_purely_imaginary() && p > 2) {
        return Ok(hecke_points(z0, p, level, weight)?
            .into_iter()
            .map(|(point, weight)| HeckeTerm { point, weight, real_part: false })
            .collect());
    }
    let mut out = Vec::with_capacity(p as usize / 2 + 2);
    if level % p != 0 {
        out.push(HeckeTerm {
            point: z0.scaled(p)?,
            weight: Rational::from(Integer::from(p).pow(weight - 1)),
            real_part: true,
        });
    }
    out.push(HeckeTerm { point: z0.hecke_image(0, p)?, weight: Rational::from((1, p)), real_part: true });
    let twice = Rational::from((2, p));
    for j in 1..=(p - 1) / 2 {
        out.push(HeckeTerm { point: z0.hecke_image(j as i64, p)?, weight: twice.clone(), real_part: true });
    }
    Ok(out)
}
