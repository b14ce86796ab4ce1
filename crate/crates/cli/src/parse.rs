//! Parsers for the command-line value syntaxes.

use num_complex::Complex64;
use rmt_lss::ensembles::EntryLaw;
use rmt_lss::lss::TestFunction;
use rmt_lss::stieltjes::SpectralWeights;

/// `a+bi`, `a-bi`, `a`, `bi` with no spaces.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let bad = || format!("expected a complex number like 1+2i, got {text:?}");
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = text.strip_suffix('i') else {
        return text.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// `mp` or `atoms=t1:w1,t2:w2,…`.
pub fn population(text: &str) -> Result<SpectralWeights, String> {
    if text == "mp" {
        return SpectralWeights::point_mass(1.0).map_err(|e| e.to_string());
    }
    let list =
        text.strip_prefix("atoms=").ok_or_else(|| format!("population must be mp or atoms=t:w,…, got {text:?}"))?;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for pair in list.split(',') {
        let (t, w) = pair.split_once(':').ok_or_else(|| format!("atom {pair:?} is not t:w"))?;
        atoms.push(t.parse::<f64>().map_err(|_| format!("bad atom location {t:?}"))?);
        weights.push(w.parse::<f64>().map_err(|_| format!("bad atom weight {w:?}"))?);
    }
    SpectralWeights::new(atoms, weights).map_err(|e| e.to_string())
}

/// `x`, `x^k`, `log`, `exp` or `poly=c0,c1,…`.
pub fn test_function(text: &str) -> Result<TestFunction, String> {
    let f = match text {
        "log" => TestFunction::Log,
        "exp" => TestFunction::Exp,
        "x" => TestFunction::monomial(1).map_err(|e| e.to_string())?,
        _ => {
            if let Some(k) = text.strip_prefix("x^") {
                let k = k.parse::<usize>().map_err(|_| format!("bad power in {text:?}"))?;
                TestFunction::monomial(k).map_err(|e| e.to_string())?
            } else if let Some(list) = text.strip_prefix("poly=") {
                let coefficients = list
                    .split(',')
                    .map(|c| c.parse::<f64>().map_err(|_| format!("bad coefficient {c:?}")))
                    .collect::<Result<Vec<_>, _>>()?;
                TestFunction::polynomial(coefficients).map_err(|e| e.to_string())?
            } else {
                return Err(format!("test function must be x, x^k, log, exp or poly=c0,c1,…, got {text:?}"));
            }
        }
    };
    Ok(f)
}

pub fn law(text: &str) -> Result<EntryLaw, String> {
    match text {
        "real-gaussian" => Ok(EntryLaw::RealGaussian),
        "complex-gaussian" => Ok(EntryLaw::ComplexGaussian),
        "real-threepoint" => Ok(EntryLaw::RealThreepoint),
        _ => Err(format!("law must be real-gaussian, complex-gaussian or real-threepoint, got {text:?}")),
    }
}
