use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bundle::SlopeValue;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{compare_with_method, CompareOutcome, ExactPosReal, Method, PrecisionPolicy};
use crate::rational::{parse_rat, Rat};

/// One side of a checked relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Quantity {
    Real(ExactPosReal),
    Slope(SlopeValue),
    /// Decimal integer.
    Integer(String),
    Count(u64),
    /// Closed interval with rational endpoints, `[lo, hi]`.
    Enclosure { lo: String, hi: String },
}

impl Quantity {
    pub fn int(v: impl Into<BigInt>) -> Self {
        Quantity::Integer(v.into().to_string())
    }

    pub fn enclosure(lo: &Rat, hi: &Rat) -> Self {
        Quantity::Enclosure {
            lo: crate::rational::fmt_rat(lo),
            hi: crate::rational::fmt_rat(hi),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Real(v) => write!(f, "{v}"),
            Quantity::Slope(s) => write!(f, "{s}"),
            Quantity::Integer(s) => f.write_str(s),
            Quantity::Count(c) => write!(f, "{c}"),
            Quantity::Enclosure { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    /// `lhs` divides `rhs`.
    Divides,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Divides => "|",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsNumerically { bits: u64 },
    Violated,
    Undecided,
    /// The unconditional part holds; the full statement rests on results
    /// that cannot be checked by finite computation.
    ConsistentWithPaper,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("Holds"),
            Verdict::HoldsNumerically { bits } => write!(f, "HoldsNumerically({bits})"),
            Verdict::Violated => f.write_str("Violated"),
            Verdict::Undecided => f.write_str("Undecided"),
            Verdict::ConsistentWithPaper => f.write_str("ConsistentWithPaper"),
        }
    }
}

/// Outcome of evaluating a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Decided { holds: bool, method: Method },
    /// Enclosures overlap: consistent with the relation up to their width.
    WithinTolerance { bits: u64 },
    Undecided,
}

fn ordering_holds(o: Ordering, rel: Relation) -> Result<bool> {
    Ok(match rel {
        Relation::Eq => o == Ordering::Equal,
        Relation::Lt => o == Ordering::Less,
        Relation::Le => o != Ordering::Greater,
        Relation::Gt => o == Ordering::Greater,
        Relation::Ge => o != Ordering::Less,
        Relation::Divides => {
            return Err(Error::InvalidInput("divisibility needs integers".into()));
        }
    })
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn compare_reals(a: &ExactPosReal, b: &ExactPosReal, rel: Relation, policy: &PrecisionPolicy) -> Result<Evaluation> {
    let (o, method) = compare_with_method(a, b, policy);
    Ok(match o {
        CompareOutcome::UndecidedAtPrecision(_) => Evaluation::Undecided,
        o => Evaluation::Decided {
            holds: ordering_holds(o.ordering().expect("decided"), rel)?,
            method,
        },
    })
}

/// Decides `lhs rel rhs`.
pub fn evaluate(lhs: &Quantity, rel: Relation, rhs: &Quantity, policy: &PrecisionPolicy) -> Result<Evaluation> {
    use Quantity::*;
    match (lhs, rhs) {
        (Real(a), Real(b)) => compare_reals(a, b, rel, policy),
        (Slope(a), Slope(b)) => compare_reals(a.exp(), b.exp(), rel, policy),
        (Integer(a), Integer(b)) => {
            let (a, b) = (parse_int(a)?, parse_int(b)?);
            let holds = if rel == Relation::Divides {
                if a == BigInt::from(0) {
                    b == a
                } else {
                    (&b % &a) == BigInt::from(0)
                }
            } else {
                ordering_holds(a.cmp(&b), rel)?
            };
            Ok(Evaluation::Decided {
                holds,
                method: Method::Exact,
            })
        }
        (Count(a), Count(b)) => Ok(Evaluation::Decided {
            holds: ordering_holds(a.cmp(b), rel)?,
            method: Method::Exact,
        }),
        (Enclosure { lo: al, hi: ah }, Enclosure { lo: bl, hi: bh }) => {
            let (al, ah, bl, bh) = (parse_rat(al)?, parse_rat(ah)?, parse_rat(bl)?, parse_rat(bh)?);
            // certainly less / certainly greater / overlapping
            let o = if ah < bl {
                Some(Ordering::Less)
            } else if al > bh {
                Some(Ordering::Greater)
            } else if al == ah && bl == bh && al == bl {
                Some(Ordering::Equal)
            } else {
                None
            };
            let bits = width_bits(&al, &ah).min(width_bits(&bl, &bh));
            match o {
                Some(o) => Ok(Evaluation::Decided {
                    holds: ordering_holds(o, rel)?,
                    method: Method::Numeric(bits),
                }),
                None => match rel {
                    Relation::Eq | Relation::Le | Relation::Ge => Ok(Evaluation::WithinTolerance { bits }),
                    _ => Ok(Evaluation::Undecided),
                },
            }
        }
        _ => Err(Error::InvalidInput(format!(
            "cannot compare {lhs} with {rhs}"
        ))),
    }
}

/// `-log2` of the relative width of `[lo, hi]`.
fn width_bits(lo: &Rat, hi: &Rat) -> u64 {
    if lo == hi || lo <= &Rat::from_integer(0.into()) {
        return 0;
    }
    let w = (hi - lo) / lo;
    let r = crate::rational::to_f64(&w);
    if r <= 0.0 {
        0
    } else {
        (-r.log2()).floor().max(0.0) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub statement_id: String,
    pub instance: String,
    pub lhs: Quantity,
    pub relation: Relation,
    pub rhs: Quantity,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    /// An entry whose verdict is computed from the relation.
    pub fn check(
        statement_id: &str,
        instance: impl Into<String>,
        lhs: Quantity,
        relation: Relation,
        rhs: Quantity,
        policy: &PrecisionPolicy,
    ) -> Entry {
        let instance = instance.into();
        let (verdict, note) = match evaluate(&lhs, relation, &rhs, policy) {
            Ok(e) => (verdict_of(e), tolerance_note(e)),
            Err(e) => (Verdict::Undecided, Some(e.to_string())),
        };
        let mut entry = Entry {
            statement_id: statement_id.into(),
            instance,
            lhs,
            relation,
            rhs,
            verdict,
            witness: None,
            note,
        };
        entry.fill_witness();
        entry
    }

    /// As `check`, with a passing verdict reported as `ConsistentWithPaper`.
    pub fn conditional(
        statement_id: &str,
        instance: impl Into<String>,
        lhs: Quantity,
        relation: Relation,
        rhs: Quantity,
        policy: &PrecisionPolicy,
    ) -> Entry {
        let mut e = Entry::check(statement_id, instance, lhs, relation, rhs, policy);
        if matches!(e.verdict, Verdict::Holds | Verdict::HoldsNumerically { .. }) {
            e.verdict = Verdict::ConsistentWithPaper;
        }
        e
    }

    /// A check that could not be carried out.
    pub fn undecided(statement_id: &str, instance: impl Into<String>, reason: impl fmt::Display) -> Entry {
        Entry {
            statement_id: statement_id.into(),
            instance: instance.into(),
            lhs: Quantity::Count(0),
            relation: Relation::Eq,
            rhs: Quantity::Count(0),
            verdict: Verdict::Undecided,
            witness: None,
            note: Some(reason.to_string()),
        }
    }

    pub fn with_witness(mut self, w: serde_json::Value) -> Entry {
        self.witness = Some(w);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Entry {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(n) => format!("{note}; {n}"),
            None => note,
        });
        self
    }

    fn fill_witness(&mut self) {
        if self.verdict == Verdict::Violated && self.witness.is_none() {
            self.witness = Some(serde_json::json!({
                "statement_id": self.statement_id,
                "instance": self.instance,
            }));
        }
    }

    /// Re-derives the verdict from the serialized sides; `false` when they disagree.
    pub fn recheck(&self, policy: &PrecisionPolicy) -> bool {
        if self.verdict == Verdict::Undecided {
            return true;
        }
        let Ok(e) = evaluate(&self.lhs, self.relation, &self.rhs, policy) else {
            return false;
        };
        match (e, self.verdict) {
            (Evaluation::Decided { holds: false, .. }, v) => v == Verdict::Violated,
            (Evaluation::Decided { holds: true, .. }, v) | (Evaluation::WithinTolerance { .. }, v) => {
                matches!(
                    v,
                    Verdict::Holds | Verdict::HoldsNumerically { .. } | Verdict::ConsistentWithPaper
                )
            }
            (Evaluation::Undecided, _) => false,
        }
    }
}

fn verdict_of(e: Evaluation) -> Verdict {
    match e {
        Evaluation::Decided { holds: false, .. } => Verdict::Violated,
        Evaluation::Decided {
            holds: true,
            method: Method::Exact,
        } => Verdict::Holds,
        Evaluation::Decided {
            holds: true,
            method: Method::Numeric(bits),
        } => Verdict::HoldsNumerically { bits },
        Evaluation::WithinTolerance { bits } => Verdict::HoldsNumerically { bits },
        Evaluation::Undecided => Verdict::Undecided,
    }
}

fn tolerance_note(e: Evaluation) -> Option<String> {
    match e {
        Evaluation::WithinTolerance { bits } => {
            Some(format!("enclosures overlap; equal to relative 2^-{bits}"))
        }
        Evaluation::Undecided => Some("not separated at the precision cap".into()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: Config,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: ReportHeader,
    pub entries: Vec<Entry>,
}

/// Orders digit runs numerically so `n=10` sorts after `n=9`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let la = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let lb = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let (da, db) = (&a[..la], &b[..lb]);
                let ta = da.iter().skip_while(|&&c| c == b'0').count();
                let tb = db.iter().skip_while(|&&c| c == b'0').count();
                let o = ta
                    .cmp(&tb)
                    .then_with(|| da[la - ta..].cmp(&db[lb - tb..]))
                    .then_with(|| la.cmp(&lb));
                if o != Ordering::Equal {
                    return o;
                }
                a = &a[la..];
                b = &b[lb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

impl Report {
    pub fn new(config: &Config, mut entries: Vec<Entry>) -> Report {
        entries.sort_by(|x, y| {
            x.statement_id
                .cmp(&y.statement_id)
                .then_with(|| natural_cmp(&x.instance, &y.instance))
        });
        Report {
            header: ReportHeader {
                tool: "adelic".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                seed: config.seed,
                config: config.clone(),
            },
            entries,
        }
    }

    pub fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.entries.iter().filter(|e| pred(&e.verdict)).count()
    }

    pub fn violated(&self) -> usize {
        self.count(|v| *v == Verdict::Violated)
    }

    pub fn undecided(&self) -> usize {
        self.count(|v| *v == Verdict::Undecided)
    }

    pub fn entries_for<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.statement_id == prefix || e.statement_id.starts_with(&format!("{prefix}.")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report> {
        Ok(serde_json::from_str(s)?)
    }

    fn summary(&self) -> [(String, usize); 5] {
        [
            ("Holds".into(), self.count(|v| *v == Verdict::Holds)),
            (
                "HoldsNumerically".into(),
                self.count(|v| matches!(v, Verdict::HoldsNumerically { .. })),
            ),
            ("ConsistentWithPaper".into(), self.count(|v| *v == Verdict::ConsistentWithPaper)),
            ("Undecided".into(), self.undecided()),
            ("Violated".into(), self.violated()),
        ]
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let c = &self.header.config;
        out.push_str(&format!(
            "# adelic verify {}\n\nseed {}, precision {} bits, radius {}, denominators <= {}, dimension cap {}\n\n",
            self.header.version, c.seed, c.precision_bits, c.search_radius, c.denom_bound, c.dimension_cap
        ));
        for (k, v) in self.summary() {
            out.push_str(&format!("- {k}: {v}\n"));
        }
        out.push_str("\n| statement | instance | lhs | rel | rhs | verdict | note |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        let cell = |s: String| -> String {
            let s = s.replace('|', "\\|");
            if s.chars().count() > 60 {
                let head: String = s.chars().take(28).collect();
                let tail: String = s.chars().rev().take(20).collect::<Vec<_>>().into_iter().rev().collect();
                format!("{head}...{tail} ({} chars)", s.chars().count())
            } else {
                s
            }
        };
        for e in &self.entries {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                e.statement_id,
                cell(e.instance.clone()),
                cell(e.lhs.to_string()),
                e.relation.to_string().replace('|', "\\|"),
                cell(e.rhs.to_string()),
                e.verdict,
                cell(e.note.clone().unwrap_or_default()),
            ));
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record(["statement_id", "instance", "lhs", "relation", "rhs", "verdict", "witness", "note"])
            .map_err(io)?;
        for e in &self.entries {
            w.write_record([
                e.statement_id.clone(),
                e.instance.clone(),
                e.lhs.to_string(),
                e.relation.to_string(),
                e.rhs.to_string(),
                e.verdict.to_string(),
                e.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
                e.note.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf8 fields"))
    }

    pub fn render(&self, format: crate::config::OutputFormat) -> Result<String> {
        use crate::config::OutputFormat::*;
        Ok(match format {
            Json => self.to_json(),
            Md => self.to_markdown(),
            Csv => self.to_csv()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn verdicts_follow_the_method() {
        let p = PrecisionPolicy::default();
        let two = Quantity::Real(ExactPosReal::from_int(2));
        let root2 = Quantity::Real(ExactPosReal::from_int(2).sqrt());
        let e = Entry::check("x", "a", root2.clone(), Relation::Lt, two.clone(), &p);
        assert_eq!(e.verdict, Verdict::Holds);
        let e_half = Quantity::Real(ExactPosReal::exp(rat(1, 2)));
        let e = Entry::check("x", "b", e_half, Relation::Gt, root2.clone(), &p);
        assert!(matches!(e.verdict, Verdict::HoldsNumerically { .. }));
        let e = Entry::check("x", "c", two, Relation::Le, root2, &p);
        assert_eq!(e.verdict, Verdict::Violated);
        assert!(e.witness.is_some());
        assert!(e.recheck(&p));
    }

    #[test]
    fn integers_and_divisibility() {
        let p = PrecisionPolicy::default();
        let e = Entry::check("x", "d", Quantity::int(6), Relation::Divides, Quantity::int(18), &p);
        assert_eq!(e.verdict, Verdict::Holds);
        let e = Entry::check("x", "d", Quantity::int(20), Relation::Lt, Quantity::int(625), &p);
        assert_eq!(e.verdict, Verdict::Holds);
        let e = Entry::check("x", "d", Quantity::Count(3), Relation::Eq, Quantity::int(3), &p);
        assert_eq!(e.verdict, Verdict::Undecided);
    }

    #[test]
    fn enclosures() {
        let p = PrecisionPolicy::default();
        let a = Quantity::enclosure(&rat(1, 3), &rat(2, 5));
        let b = Quantity::enclosure(&rat(1, 2), &int(1));
        let e = Entry::check("x", "e", a.clone(), Relation::Le, b, &p);
        assert!(matches!(e.verdict, Verdict::HoldsNumerically { .. }));
        assert!(e.note.is_none());
        let e = Entry::check("x", "e", a.clone(), Relation::Le, a, &p);
        assert!(matches!(e.verdict, Verdict::HoldsNumerically { .. }));
        assert!(e.note.is_some());
    }

    #[test]
    fn natural_order() {
        let mut v = vec!["n=10", "n=9", "n=1, l=2", "n=1, l=10"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["n=1, l=2", "n=1, l=10", "n=9", "n=10"]);
    }
}
