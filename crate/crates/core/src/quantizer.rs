//! Symmetric uniform alphabets and the memoryless scalar quantizer (MSQ).
//!
//! Every alphabet built here has its largest element equal to the scale `c`
//! bit-for-bit, so entries of magnitude exactly `c` quantize with zero error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetKind {
    /// `{±(k − ½)δ : 1 ≤ k ≤ K}`, 2K elements, no zero.
    Midrise,
    /// `{±kδ : 0 ≤ k ≤ K}`, 2K + 1 elements including zero.
    Midtread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "AlphabetRepr", try_from = "AlphabetRepr")]
pub struct Alphabet {
    kind: AlphabetKind,
    levels: usize,
    step: f64,
    scale: f64,
    bits: Option<u32>,
    elements: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    kind: AlphabetKind,
    #[serde(rename = "K")]
    levels: usize,
    c: f64,
    elements: Vec<f64>,
}

impl From<Alphabet> for AlphabetRepr {
    fn from(a: Alphabet) -> Self {
        AlphabetRepr {
            kind: a.kind,
            levels: a.levels,
            c: a.scale,
            elements: a.elements,
        }
    }
}

impl TryFrom<AlphabetRepr> for Alphabet {
    type Error = Error;
    fn try_from(r: AlphabetRepr) -> Result<Self> {
        let a = match r.kind {
            AlphabetKind::Midrise => build_midrise(r.levels, r.c)?,
            AlphabetKind::Midtread => build_midtread(r.levels, r.c)?,
        };
        if a.elements != r.elements {
            return Err(Error::InvalidParameter(
                "alphabet elements do not match kind, K and c".into(),
            ));
        }
        Ok(a)
    }
}

fn check_scale(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("scale must be positive and finite, got {c}")))
    }
}

/// Midrise alphabet with `2K` elements and largest element `c`.
pub fn build_midrise(levels: usize, c: f64) -> Result<Alphabet> {
    if levels == 0 {
        return Err(Error::InvalidParameter("midrise alphabet needs K ≥ 1".into()));
    }
    check_scale(c)?;
    let denom = (2 * levels - 1) as f64;
    let positive: Vec<f64> = (1..=levels)
        .map(|k| if k == levels { c } else { c * (2 * k - 1) as f64 / denom })
        .collect();
    Ok(Alphabet {
        kind: AlphabetKind::Midrise,
        levels,
        step: 2.0 * c / denom,
        scale: c,
        bits: None,
        elements: mirror(&positive, false),
    })
}

/// Midtread alphabet with `2K + 1` elements and largest element `c`.
pub fn build_midtread(levels: usize, c: f64) -> Result<Alphabet> {
    if levels == 0 {
        return Err(Error::InvalidParameter("midtread alphabet needs K ≥ 1".into()));
    }
    check_scale(c)?;
    let denom = levels as f64;
    let positive: Vec<f64> = (1..=levels)
        .map(|k| if k == levels { c } else { c * k as f64 / denom })
        .collect();
    Ok(Alphabet {
        kind: AlphabetKind::Midtread,
        levels,
        step: c / denom,
        scale: c,
        bits: None,
        elements: mirror(&positive, true),
    })
}

/// The `2^B`-element midrise alphabet on `[−c, c]`.
pub fn build_uniform_bbit(bits: u32, c: f64) -> Result<Alphabet> {
    if bits == 0 || bits > 52 {
        return Err(Error::InvalidParameter(format!("bit budget must be in 1..=52, got {bits}")));
    }
    let mut a = build_midrise(1usize << (bits - 1), c)?;
    a.bits = Some(bits);
    Ok(a)
}

fn mirror(positive: &[f64], with_zero: bool) -> Vec<f64> {
    let mut out: Vec<f64> = positive.iter().rev().map(|p| -p).collect();
    if with_zero {
        out.push(0.0);
    }
    out.extend_from_slice(positive);
    out
}

impl Alphabet {
    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Spacing δ between consecutive elements.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Largest element `c`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bits(&self) -> Option<u32> {
        self.bits
    }

    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: f64) -> bool {
        p.is_finite() && self.elements.binary_search_by(|e| e.partial_cmp(&p).unwrap()).is_ok()
    }

    /// Nearest element; exact ties go to the larger element.
    pub fn quantize(&self, z: f64) -> f64 {
        msq(z, self)
    }

    pub fn quantize_slice(&self, z: &[f64]) -> Vec<f64> {
        z.iter().map(|&v| msq(v, self)).collect()
    }

    pub fn quantize_matrix(&self, m: &DenseMatrix) -> DenseMatrix {
        m.map(|v| msq(v, self))
    }
}

/// Memoryless scalar quantization of one value.
pub fn msq(z: f64, alphabet: &Alphabet) -> f64 {
    let e = &alphabet.elements;
    let idx = e.partition_point(|&p| p < z);
    if idx == 0 {
        return e[0];
    }
    if idx == e.len() {
        return e[e.len() - 1];
    }
    let (lo, hi) = (e[idx - 1], e[idx]);
    if z - lo < hi - z {
        lo
    } else {
        hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub alphabet: Alphabet,
    /// `max_{z ∈ [−c, c]} |z − Q(z)|`.
    pub worst_case: f64,
    /// `c·2^{−B}`, recorded for B-bit alphabets only. Not attainable for small B.
    pub nominal: Option<f64>,
}

/// Worst-case rounding error over `[−c, c]`.
///
/// The maximum is attained at cell midpoints (the endpoints ±c are alphabet
/// elements and contribute zero). For a uniform grid every cell has width δ, so
/// the value is δ/2, which equals `c/(2^B − 1)` for B-bit alphabets.
pub fn worst_case_distortion(alphabet: &Alphabet) -> DistortionProfile {
    let c = alphabet.scale;
    let half_step = match alphabet.kind {
        AlphabetKind::Midrise => c / (2 * alphabet.levels - 1) as f64,
        AlphabetKind::Midtread => c / (2 * alphabet.levels) as f64,
    };
    debug_assert!({
        let enumerated = alphabet
            .elements
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]))
            .fold(0.0_f64, f64::max);
        (enumerated - half_step).abs() <= 1e-12 * c
    });
    DistortionProfile {
        alphabet: alphabet.clone(),
        worst_case: half_step,
        nominal: alphabet.bits.map(|b| c * 0.5_f64.powi(b as i32)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midrise_examples() {
        assert_eq!(build_midrise(1, 1.0).unwrap().elements(), &[-1.0, 1.0]);
        assert_eq!(
            build_midrise(2, 1.0).unwrap().elements(),
            &[-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]
        );
        assert_eq!(build_midrise(2, 3.0).unwrap().elements(), &[-3.0, -1.0, 1.0, 3.0]);
        assert!(matches!(build_midrise(0, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_midrise(2, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_midrise(2, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn midtread_examples() {
        assert_eq!(build_midtread(1, 1.0).unwrap().elements(), &[-1.0, 0.0, 1.0]);
        assert_eq!(
            build_midtread(2, 1.0).unwrap().elements(),
            &[-1.0, -0.5, 0.0, 0.5, 1.0]
        );
        assert_eq!(build_midtread(1, 0.3).unwrap().elements(), &[-0.3, 0.0, 0.3]);
        assert!(matches!(build_midtread(0, 1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bbit_examples() {
        let a = build_uniform_bbit(1, 1.0).unwrap();
        assert_eq!(a.elements(), &[-1.0, 1.0]);
        let d = worst_case_distortion(&a);
        assert_eq!(d.worst_case, 1.0);
        assert_eq!(d.nominal, Some(0.5));

        let a = build_uniform_bbit(2, 1.0).unwrap();
        assert_eq!(a.elements(), &[-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]);
        assert_eq!(worst_case_distortion(&a).worst_case, 1.0 / 3.0);

        let a = build_uniform_bbit(3, 2.0).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(worst_case_distortion(&a).worst_case, 2.0 / 7.0);
        assert!(matches!(build_uniform_bbit(0, 1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn ternary_distortion() {
        let a = build_midtread(1, 1.0).unwrap();
        let d = worst_case_distortion(&a);
        assert_eq!(d.worst_case, 0.5);
        assert_eq!(d.nominal, None);
    }

    #[test]
    fn msq_examples() {
        assert_eq!(msq(0.3, &build_midrise(1, 1.0).unwrap()), 1.0);
        assert_eq!(msq(-0.3, &build_midtread(1, 1.0).unwrap()), 0.0);
        assert_eq!(msq(0.0, &build_midrise(1, 0.3).unwrap()), 0.3);
        assert_eq!(msq(-7.0, &build_midrise(1, 0.3).unwrap()), -0.3);
        assert_eq!(msq(7.0, &build_midtread(2, 0.3).unwrap()), 0.3);
    }

    #[test]
    fn json_schema_round_trip() {
        let a = build_midtread(2, 1.0).unwrap();
        let json = serde_json::to_value(&a).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"kind": "midtread", "K": 2, "c": 1.0,
                               "elements": [-1.0, -0.5, 0.0, 0.5, 1.0]})
        );
        let back: Alphabet = serde_json::from_value(json).unwrap();
        assert_eq!(back, a);
        let bad = serde_json::json!({"kind": "midrise", "K": 1, "c": 1.0, "elements": [0.0]});
        assert!(serde_json::from_value::<Alphabet>(bad).is_err());
    }

    fn alphabet_strategy() -> impl Strategy<Value = Alphabet> {
        (any::<bool>(), 1usize..20, 0.01f64..100.0).prop_map(|(mid, k, c)| {
            if mid {
                build_midrise(k, c).unwrap()
            } else {
                build_midtread(k, c).unwrap()
            }
        })
    }

    proptest! {
        #[test]
        fn structural_invariants(a in alphabet_strategy()) {
            let e = a.elements();
            prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(*e.last().unwrap(), a.scale());
            prop_assert_eq!(e[0], -a.scale());
            for &p in e {
                prop_assert!(a.contains(-p));
                prop_assert_eq!(msq(p, &a), p);
            }
            let expected = match a.kind() {
                AlphabetKind::Midrise => 2 * a.levels(),
                AlphabetKind::Midtread => 2 * a.levels() + 1,
            };
            prop_assert_eq!(e.len(), expected);
        }

        #[test]
        fn monotone_and_odd(a in alphabet_strategy(), x in -200.0f64..200.0, y in -200.0f64..200.0) {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(msq(lo, &a) <= msq(hi, &a));
            let q = msq(x, &a);
            let is_tie = a.elements().iter().filter(|&&p| ((x - p).abs() - (x - q).abs()).abs() == 0.0).count() > 1;
            if !is_tie {
                prop_assert_eq!(msq(-x, &a), -q);
            }
        }

        #[test]
        fn bounded_distortion(a in alphabet_strategy(), t in -1.0f64..=1.0) {
            let d = worst_case_distortion(&a);
            let z = t * a.scale();
            prop_assert!((z - msq(z, &a)).abs() <= d.worst_case * (1.0 + 1e-12));
        }
    }

    #[test]
    fn distortion_attained_at_a_midpoint() {
        for bits in 1..=8 {
            let a = build_uniform_bbit(bits, 1.7).unwrap();
            let d = worst_case_distortion(&a);
            let mid = 0.5 * (a.elements()[0] + a.elements()[1]);
            assert!(((mid - msq(mid, &a)).abs() - d.worst_case).abs() < 1e-14);
        }
    }
}
