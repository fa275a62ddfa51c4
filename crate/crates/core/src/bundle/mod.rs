//! Adelic hermitian bundles in twisted-standard form.
//!
//! A bundle is `Q^n` with one archimedean Gram matrix and, at finitely many
//! primes, local matrices `D_L M D_R` where `D = diag(pi^{d_i})` and `pi^d`
//! has `p`-adic absolute value `p^{-d}`. Places not covered by a twist carry
//! the standard sup norm.

mod derived;
mod height;
mod search;
mod slope;
mod split;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use derived::{direct_sum, dual, ext_power, sym_power, sym_power_basis, DEFAULT_DIMENSION_CAP};
pub use height::{height, height_primitive, HeightResult};
pub use search::{lines_in_box, min_search, min_search_with, MinSearch, SearchOptions, DEFAULT_NODE_CAP};
pub use slope::{slope, subspace_slope, SlopeValue};
pub use split::{
    coordinate_line_slopes, lambda_lower_bound, max_slope, split_detect, Certificate, LambdaRoute,
    MaxSlope, MaxSlopeMode, SearchFamily, SplitWitness,
};

pub use derived::tensor;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::primes::is_prime;
use crate::rational::{fmt_rat, Rat, RatStr};

/// Archimedean Gram matrix; diagonal ones are stored compactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gram {
    Diagonal(Vec<Rat>),
    Dense(RatMatrix),
}

impl Gram {
    pub fn identity(n: usize) -> Self {
        Gram::Diagonal(vec![Rat::one(); n])
    }

    /// Stores diagonal matrices compactly.
    pub fn from_matrix(m: RatMatrix) -> Self {
        if m.is_diagonal() {
            Gram::Diagonal((0..m.rows()).map(|i| m[(i, i)].clone()).collect())
        } else {
            Gram::Dense(m)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Gram::Diagonal(d) => d.len(),
            Gram::Dense(m) => m.rows(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Rat {
        match self {
            Gram::Diagonal(d) => {
                if i == j {
                    d[i].clone()
                } else {
                    Rat::zero()
                }
            }
            Gram::Dense(m) => m[(i, j)].clone(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gram::Diagonal(_))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Gram::Diagonal(d) => d.iter().all(One::is_one),
            Gram::Dense(m) => m.is_identity(),
        }
    }

    pub fn to_matrix(&self) -> RatMatrix {
        match self {
            Gram::Diagonal(d) => RatMatrix::diagonal(d),
            Gram::Dense(m) => m.clone(),
        }
    }

    pub fn quad_form(&self, x: &[Rat]) -> Result<Rat> {
        match self {
            Gram::Diagonal(d) => {
                if d.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: d.len(),
                        found: x.len(),
                    });
                }
                Ok(d
                    .iter()
                    .zip(x)
                    .filter(|(_, xi)| !xi.is_zero())
                    .fold(Rat::zero(), |acc, (g, xi)| acc + g * xi * xi))
            }
            Gram::Dense(m) => m.quad_form(x),
        }
    }

    pub fn det(&self) -> Rat {
        match self {
            Gram::Diagonal(d) => d.iter().fold(Rat::one(), |acc, g| acc * g),
            Gram::Dense(m) => m.det().expect("square"),
        }
    }

    pub fn inverse(&self) -> Result<Gram> {
        match self {
            Gram::Diagonal(d) => {
                if d.iter().any(Zero::is_zero) {
                    return Err(Error::SingularMatrix("Gram matrix".into()));
                }
                Ok(Gram::Diagonal(d.iter().map(|g| g.recip()).collect()))
            }
            Gram::Dense(m) => Ok(Gram::from_matrix(m.inverse()?)),
        }
    }

    /// `B^T G B` for a matrix whose columns are the basis vectors.
    pub fn restrict(&self, b: &RatMatrix) -> Result<RatMatrix> {
        let gb = match self {
            Gram::Diagonal(d) => {
                let mut out = b.clone();
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        out[(i, j)] *= &d[i];
                    }
                }
                out
            }
            Gram::Dense(m) => m.mul(b)?,
        };
        b.transpose().mul(&gb)
    }

    pub fn is_positive_definite(&self) -> bool {
        match self {
            Gram::Diagonal(d) => d.iter().all(Signed::is_positive),
            Gram::Dense(m) => m.is_positive_definite(),
        }
    }
}

/// Local matrix `D_L M D_R` on a class of places above `p` of total weight `weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalTwist {
    pub p: BigUint,
    pub weight: Rat,
    pub d_left: Vec<Rat>,
    pub m: RatMatrix,
    pub d_right: Vec<Rat>,
}

impl LocalTwist {
    pub fn identity(p: BigUint, weight: Rat, n: usize) -> Self {
        Self {
            p,
            weight,
            d_left: vec![Rat::zero(); n],
            m: RatMatrix::identity(n),
            d_right: vec![Rat::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.d_left.len()
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity()
            && self.d_left.iter().all(Zero::is_zero)
            && self.d_right.iter().all(Zero::is_zero)
    }

    /// For monomial `M`, the right shifts moved to the left:
    /// `(M D_R)_{i, s(i)} = pi^{d_right[s(i)]} M_{i, s(i)}`.
    pub(crate) fn folded_left(&self) -> Option<Vec<Rat>> {
        let perm = self.m.monomial_permutation()?;
        Some(
            perm.iter()
                .enumerate()
                .map(|(i, &j)| &self.d_left[i] + &self.d_right[j])
                .collect(),
        )
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !is_prime(&self.p) {
            return Err(Error::InvalidInput(format!("twist prime {} is not prime", self.p)));
        }
        if !self.weight.is_positive() || self.weight > Rat::one() {
            return Err(Error::InvalidInput(format!(
                "twist weight {} not in (0, 1]",
                fmt_rat(&self.weight)
            )));
        }
        for len in [self.d_left.len(), self.d_right.len(), self.m.rows(), self.m.cols()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if self.m.det()?.is_zero() {
            return Err(Error::SingularMatrix(format!("local matrix at p = {}", self.p)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    dim: usize,
    gram: Gram,
    twists: Vec<LocalTwist>,
}

impl Bundle {
    /// Validates every invariant: dimensions, positive definiteness, nonsingular
    /// local matrices, prime keys and per-prime weight sums at most 1.
    pub fn new(dim: usize, gram: Gram, twists: Vec<LocalTwist>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if gram.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: gram.dim(),
            });
        }
        if let Gram::Dense(m) = &gram {
            if !m.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: m.rows(),
                    found: m.cols(),
                });
            }
            if !m.is_symmetric() {
                return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
            }
        }
        if !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let mut totals: BTreeMap<&BigUint, Rat> = BTreeMap::new();
        for t in &twists {
            t.validate(dim)?;
            *totals.entry(&t.p).or_insert_with(Rat::zero) += &t.weight;
        }
        for (p, total) in totals {
            if total > Rat::one() {
                return Err(Error::WeightOverflow {
                    prime: p.to_string(),
                    total: fmt_rat(&total),
                });
            }
        }
        Ok(Self { dim, gram, twists })
    }

    pub fn standard(n: usize) -> Self {
        Self::new(n, Gram::identity(n), Vec::new()).expect("standard bundle is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn twists(&self) -> &[LocalTwist] {
        &self.twists
    }

    /// Twist primes with their residual (sup-norm) weights.
    pub fn twist_primes(&self) -> BTreeMap<BigUint, Rat> {
        let mut out: BTreeMap<BigUint, Rat> = BTreeMap::new();
        for t in &self.twists {
            *out.entry(t.p.clone()).or_insert_with(Rat::one) -= &t.weight;
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PrimeWire {
    Num(u64),
    Str(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwistWire {
    p: PrimeWire,
    weight: RatStr,
    d_left: Vec<RatStr>,
    m: Vec<Vec<RatStr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_right: Option<Vec<RatStr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleWire {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arch_gram: Option<Vec<Vec<RatStr>>>,
    #[serde(default)]
    twists: Vec<TwistWire>,
}

fn rows_to_wire(m: &RatMatrix) -> Vec<Vec<RatStr>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(RatStr).collect())
        .collect()
}

fn rows_from_wire(rows: Vec<Vec<RatStr>>) -> Result<RatMatrix> {
    RatMatrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect(),
    )
}

impl Serialize for Bundle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = BundleWire {
            dim: self.dim,
            arch_gram: (!self.gram.is_identity()).then(|| rows_to_wire(&self.gram.to_matrix())),
            twists: self
                .twists
                .iter()
                .map(|t| TwistWire {
                    p: match t.p.to_u64() {
                        Some(p) => PrimeWire::Num(p),
                        None => PrimeWire::Str(t.p.to_string()),
                    },
                    weight: RatStr(t.weight.clone()),
                    d_left: t.d_left.iter().cloned().map(RatStr).collect(),
                    m: rows_to_wire(&t.m),
                    d_right: (!t.d_right.iter().all(Zero::is_zero))
                        .then(|| t.d_right.iter().cloned().map(RatStr).collect()),
                })
                .collect(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = BundleWire::deserialize(d)?;
        let gram = match w.arch_gram {
            None => Gram::identity(w.dim),
            Some(rows) => Gram::from_matrix(rows_from_wire(rows).map_err(D::Error::custom)?),
        };
        let mut twists = Vec::with_capacity(w.twists.len());
        for t in w.twists {
            let p = match t.p {
                PrimeWire::Num(p) => BigUint::from(p),
                PrimeWire::Str(s) => s
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad prime {s:?}")))?,
            };
            let n = t.d_left.len();
            twists.push(LocalTwist {
                p,
                weight: t.weight.0,
                d_left: t.d_left.into_iter().map(|x| x.0).collect(),
                m: rows_from_wire(t.m).map_err(D::Error::custom)?,
                d_right: match t.d_right {
                    Some(v) => v.into_iter().map(|x| x.0).collect(),
                    None => vec![Rat::zero(); n],
                },
            });
        }
        Bundle::new(w.dim, gram, twists).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn eq_json(q: &str) -> String {
        format!(
            r#"{{"dim":2,"twists":[{{"p":5,"weight":"1/2","d_left":["0","-{q}"],"m":[["1","0"],["1","1"]]}},{{"p":5,"weight":"1/2","d_left":["0","-{q}"],"m":[["1","0"],["1","-1"]]}}]}}"#
        )
    }

    #[test]
    fn make_bundle_examples() {
        let std2 = Bundle::standard(2);
        assert!(std2.twists().is_empty() && std2.gram().is_identity());
        let b = Bundle::from_json(&eq_json("1/4")).unwrap();
        assert_eq!(b.twists().len(), 2);

        let over = LocalTwist {
            weight: rat(3, 4),
            ..LocalTwist::identity(5u32.into(), int(1), 2)
        };
        let mut second = over.clone();
        second.weight = rat(1, 2);
        second.d_left[0] = int(1);
        assert!(matches!(
            Bundle::new(2, Gram::identity(2), vec![over, second]),
            Err(Error::WeightOverflow { .. })
        ));
    }

    #[test]
    fn invalid_inputs_rejected() {
        let sing = LocalTwist {
            m: RatMatrix::from_i64(&[&[1, 1], &[1, 1]]),
            ..LocalTwist::identity(3u32.into(), int(1), 2)
        };
        assert!(matches!(
            Bundle::new(2, Gram::identity(2), vec![sing]),
            Err(Error::SingularMatrix(_))
        ));
        let indef = Gram::from_matrix(RatMatrix::from_i64(&[&[1, 2], &[2, 1]]));
        assert!(matches!(
            Bundle::new(2, indef, vec![]),
            Err(Error::NotPositiveDefinite)
        ));
        let not_prime = LocalTwist::identity(6u32.into(), int(1), 2);
        assert!(Bundle::new(2, Gram::identity(2), vec![not_prime]).is_err());
        assert!(Bundle::from_json(r#"{"dim":2,"arch_gram":[["1","0"]]}"#).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = eq_json("1/4");
        let b = Bundle::from_json(&s).unwrap();
        assert_eq!(b.to_json(), s);
        let g = r#"{"dim":2,"arch_gram":[["2","1"],["1","2"]],"twists":[]}"#;
        assert_eq!(Bundle::from_json(g).unwrap().to_json(), g);
        let dr = r#"{"dim":1,"twists":[{"p":7,"weight":"1","d_left":["1/3"],"m":[["2"]],"d_right":["-1/2"]}]}"#;
        assert_eq!(Bundle::from_json(dr).unwrap().to_json(), dr);
    }
}
