//! Complex numbers in JSON as `{"re": …, "im": …}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Repr {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Repr { re: c.re, im: c.im }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let r = Repr::deserialize(d)?;
    Ok(Complex64::new(r.re, r.im))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = v.iter().map(|c| Repr { re: c.re, im: c.im }).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let reprs = Vec::<Repr>::deserialize(d)?;
        Ok(reprs.into_iter().map(|r| Complex64::new(r.re, r.im)).collect())
    }
}
