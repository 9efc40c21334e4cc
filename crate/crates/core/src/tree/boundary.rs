use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{push_reduced, Letter, Rank, ReducedWord};

/// A point of the Gromov boundary of the Cayley tree of `F_N`: an infinite
/// reduced word.
///
/// `Periodic` is `preperiod · period · period · …`, kept in a normal form where
/// the period is primitive and the preperiod does not end with the period's
/// last letter, so equal points have equal representations. `Truncated` is a
/// finite prefix of which only the first `certified_depth` letters are trusted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BoundaryPoint {
    Periodic {
        preperiod: ReducedWord,
        period: ReducedWord,
    },
    Truncated {
        prefix: ReducedWord,
        certified_depth: usize,
    },
}

impl BoundaryPoint {
    pub fn periodic(preperiod: ReducedWord, period: ReducedWord) -> Result<Self> {
        let per = period.letters();
        if per.is_empty() {
            return Err(Error::invalid("boundary period must be nonempty"));
        }
        if per.len() > 1 && per[0] == per[per.len() - 1].inverse() {
            return Err(Error::invalid(format!("period '{period}' cancels against itself")));
        }
        if preperiod.letters().last().is_some_and(|&l| l == per[0].inverse()) {
            return Err(Error::invalid(format!(
                "preperiod '{preperiod}' cancels against period '{period}'"
            )));
        }
        Ok(normalize(preperiod.into_letters(), per.to_vec()))
    }

    /// `w^∞` for a cyclically reduced nonempty `w`.
    pub fn ray(period: ReducedWord) -> Result<Self> {
        BoundaryPoint::periodic(ReducedWord::empty(), period)
    }

    pub fn truncated(prefix: ReducedWord, certified_depth: usize) -> Result<Self> {
        if certified_depth > prefix.len() {
            return Err(Error::invalid(format!(
                "certified depth {certified_depth} exceeds prefix length {}",
                prefix.len()
            )));
        }
        Ok(BoundaryPoint::Truncated {
            prefix,
            certified_depth,
        })
    }

    pub fn parse(s: &str, rank: Rank) -> Result<Self> {
        let p: BoundaryPoint = s.parse()?;
        p.check_rank(rank)?;
        Ok(p)
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, BoundaryPoint::Truncated { .. })
    }

    /// Number of trustworthy letters; `None` for exact points.
    pub fn certified_depth(&self) -> Option<usize> {
        match self {
            BoundaryPoint::Periodic { .. } => None,
            BoundaryPoint::Truncated { certified_depth, .. } => Some(*certified_depth),
        }
    }

    pub fn max_generator(&self) -> usize {
        match self {
            BoundaryPoint::Periodic { preperiod, period } => preperiod.max_generator().max(period.max_generator()),
            BoundaryPoint::Truncated { prefix, .. } => prefix.max_generator(),
        }
    }

    pub fn check_rank(&self, rank: Rank) -> Result<()> {
        if self.max_generator() > rank.get() {
            return Err(Error::invalid(format!("boundary point {self} exceeds rank {rank}")));
        }
        Ok(())
    }

    /// The `k`-th letter (0-based), or `None` past the certified depth.
    #[inline]
    pub fn letter(&self, k: usize) -> Option<Letter> {
        match self {
            BoundaryPoint::Periodic { preperiod, period } => {
                let pre = preperiod.letters();
                Some(if k < pre.len() {
                    pre[k]
                } else {
                    let per = period.letters();
                    per[(k - pre.len()) % per.len()]
                })
            }
            BoundaryPoint::Truncated {
                prefix,
                certified_depth,
            } => (k < *certified_depth).then(|| prefix.letters()[k]),
        }
    }

    /// The first `len` letters as a word.
    pub fn prefix(&self, len: usize) -> Result<ReducedWord> {
        let letters = (0..len)
            .map(|k| self.letter(k).ok_or_else(|| undecidable(len, "boundary prefix")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReducedWord::from_reduced_unchecked(letters))
    }

    /// `g · ξ`: prepend `g` and cancel at the seam.
    pub fn act(&self, g: &ReducedWord) -> Result<BoundaryPoint> {
        match self {
            BoundaryPoint::Periodic { preperiod, period } => {
                let mut buf = g.letters().to_vec();
                for &x in preperiod.letters() {
                    push_reduced(&mut buf, x);
                }
                let per = period.letters();
                // keep cancelling into the periodic tail
                let mut j = 0;
                while buf.last().is_some_and(|&l| l == per[j % per.len()].inverse()) {
                    buf.pop();
                    j += 1;
                }
                let shift = j % per.len();
                let mut rotated = per[shift..].to_vec();
                rotated.extend_from_slice(&per[..shift]);
                Ok(normalize(buf, rotated))
            }
            BoundaryPoint::Truncated {
                prefix,
                certified_depth,
            } => {
                let trusted = &prefix.letters()[..*certified_depth];
                let mut buf = g.letters().to_vec();
                let mut consumed = 0;
                for &x in trusted {
                    if buf.last().is_some_and(|&l| l == x.inverse()) {
                        buf.pop();
                        consumed += 1;
                    } else {
                        break;
                    }
                }
                if consumed == trusted.len() && !buf.is_empty() {
                    return Err(undecidable(*certified_depth, "boundary action"));
                }
                buf.extend_from_slice(&trusted[consumed..]);
                let depth = buf.len();
                Ok(BoundaryPoint::Truncated {
                    prefix: ReducedWord::from_reduced_unchecked(buf),
                    certified_depth: depth,
                })
            }
        }
    }
}

pub(crate) fn undecidable(depth: usize, what: &str) -> Error {
    Error::Undecidable {
        depth,
        what: what.to_string(),
    }
}

/// Smallest `d` with `w = u^(|w|/d)`.
fn primitive_root_len(w: &[Letter]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]))
        .unwrap_or(n)
}

fn normalize(mut pre: Vec<Letter>, mut per: Vec<Letter>) -> BoundaryPoint {
    per.truncate(primitive_root_len(&per));
    // pre = p' x and per = q x: the point equals p' · (x q)^∞
    while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
        if a != b {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    BoundaryPoint::Periodic {
        preperiod: ReducedWord::from_reduced_unchecked(pre),
        period: ReducedWord::from_reduced_unchecked(per),
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |w: &ReducedWord| if w.is_empty() { String::new() } else { w.to_string() };
        match self {
            BoundaryPoint::Periodic { preperiod, period } if preperiod.is_empty() => write!(f, "per:{period}"),
            BoundaryPoint::Periodic { preperiod, period } => write!(f, "pre:{preperiod} per:{period}"),
            BoundaryPoint::Truncated {
                prefix,
                certified_depth,
            } => write!(f, "prefix:{} depth:{certified_depth}", word(prefix)),
        }
    }
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryPoint({self})")
    }
}

/// Accepts `"pre:ab per:ba"` (either field may come first; `pre:` may be
/// omitted) and `"prefix:abab depth:4"`.
impl FromStr for BoundaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::invalid(format!("boundary literal '{s}': {why}"));
        let word = |w: &str| -> Result<ReducedWord> {
            let parsed: ReducedWord = w.parse()?;
            if parsed.len() != w.chars().filter(|c| *c != '1').count() {
                return Err(bad("word is not reduced"));
            }
            Ok(parsed)
        };
        let (mut pre, mut per, mut prefix, mut depth) = (None, None, None, None);
        for field in s.split_whitespace() {
            let (key, value) = field.split_once(':').ok_or_else(|| bad("expected key:value fields"))?;
            let slot = match key {
                "pre" => &mut pre,
                "per" => &mut per,
                "prefix" => &mut prefix,
                "depth" => &mut depth,
                _ => return Err(bad(&format!("unknown field '{key}'"))),
            };
            if slot.replace(value).is_some() {
                return Err(bad(&format!("field '{key}' given twice")));
            }
        }
        match (pre, per, prefix, depth) {
            (pre, Some(per), None, None) => BoundaryPoint::periodic(word(pre.unwrap_or(""))?, word(per)?),
            (None, None, Some(prefix), Some(depth)) => {
                let depth = depth.parse().map_err(|_| bad("depth is not an integer"))?;
                BoundaryPoint::truncated(word(prefix)?, depth)
            }
            _ => Err(bad("expected 'pre:.. per:..' or 'prefix:.. depth:..'")),
        }
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
