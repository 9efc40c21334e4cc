use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::letter::{Letter, Rank};
use super::word::ReducedWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Nielsen-type generators of `Aut(F_N)`. Indices are 1-based.
///
/// Text ids: `rmul(i,j,±)` is `a_i ↦ a_i a_j^{±1}`, `lmul(i,j,±)` is
/// `a_i ↦ a_j^{±1} a_i`, `inv(i)` is `a_i ↦ a_i^{-1}`, `swap(i,j)` exchanges
/// `a_i` and `a_j`. Every other generator is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elementary {
    RightMultiply { i: u8, j: u8, sign: Sign },
    LeftMultiply { i: u8, j: u8, sign: Sign },
    Inversion { i: u8 },
    Transposition { i: u8, j: u8 },
}

impl Elementary {
    pub fn right_multiply(i: usize, j: usize, sign: Sign) -> Result<Self> {
        check_pair(i, j, "rmul")?;
        Ok(Elementary::RightMultiply {
            i: i as u8,
            j: j as u8,
            sign,
        })
    }

    pub fn left_multiply(i: usize, j: usize, sign: Sign) -> Result<Self> {
        check_pair(i, j, "lmul")?;
        Ok(Elementary::LeftMultiply {
            i: i as u8,
            j: j as u8,
            sign,
        })
    }

    pub fn inversion(i: usize) -> Result<Self> {
        check_index(i)?;
        Ok(Elementary::Inversion { i: i as u8 })
    }

    pub fn transposition(i: usize, j: usize) -> Result<Self> {
        check_pair(i, j, "swap")?;
        Ok(Elementary::Transposition {
            i: i as u8,
            j: j as u8,
        })
    }

    /// Every elementary generator of the given rank.
    pub fn all(rank: Rank) -> Vec<Elementary> {
        let n = rank.get();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for sign in [Sign::Plus, Sign::Minus] {
                    out.push(Elementary::RightMultiply {
                        i: i as u8,
                        j: j as u8,
                        sign,
                    });
                    out.push(Elementary::LeftMultiply {
                        i: i as u8,
                        j: j as u8,
                        sign,
                    });
                }
            }
        }
        for i in 1..=n {
            out.push(Elementary::Inversion { i: i as u8 });
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(Elementary::Transposition {
                    i: i as u8,
                    j: j as u8,
                });
            }
        }
        out
    }

    pub fn inverse(self) -> Elementary {
        match self {
            Elementary::RightMultiply { i, j, sign } => Elementary::RightMultiply {
                i,
                j,
                sign: sign.flip(),
            },
            Elementary::LeftMultiply { i, j, sign } => Elementary::LeftMultiply {
                i,
                j,
                sign: sign.flip(),
            },
            other => other,
        }
    }

    pub fn max_index(self) -> usize {
        match self {
            Elementary::RightMultiply { i, j, .. }
            | Elementary::LeftMultiply { i, j, .. }
            | Elementary::Transposition { i, j } => i.max(j) as usize,
            Elementary::Inversion { i } => i as usize,
        }
    }

    /// Images of the basis letters.
    pub fn images(self, rank: Rank) -> Result<Vec<ReducedWord>> {
        if self.max_index() > rank.get() {
            return Err(Error::invalid(format!(
                "generator {self} needs rank ≥ {}, got {rank}",
                self.max_index()
            )));
        }
        let gen = |k: u8| Letter::new(k as usize, false).expect("index checked");
        let mut images: Vec<ReducedWord> = (1..=rank.get() as u8)
            .map(|k| ReducedWord::letter(gen(k)))
            .collect();
        match self {
            Elementary::RightMultiply { i, j, sign } => {
                let y = Letter::new(j as usize, sign.is_minus()).expect("index checked");
                images[i as usize - 1] = ReducedWord::from_reduced_unchecked(vec![gen(i), y]);
            }
            Elementary::LeftMultiply { i, j, sign } => {
                let y = Letter::new(j as usize, sign.is_minus()).expect("index checked");
                images[i as usize - 1] = ReducedWord::from_reduced_unchecked(vec![y, gen(i)]);
            }
            Elementary::Inversion { i } => {
                images[i as usize - 1] = ReducedWord::letter(gen(i).inverse());
            }
            Elementary::Transposition { i, j } => {
                images.swap(i as usize - 1, j as usize - 1);
            }
        }
        Ok(images)
    }
}

fn check_index(i: usize) -> Result<()> {
    if i == 0 || i > super::letter::MAX_RANK {
        return Err(Error::invalid(format!("generator index {i} out of range")));
    }
    Ok(())
}

fn check_pair(i: usize, j: usize, kind: &str) -> Result<()> {
    check_index(i)?;
    check_index(j)?;
    if i == j {
        return Err(Error::invalid(format!("{kind} needs distinct indices, got {i} twice")));
    }
    Ok(())
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Elementary::RightMultiply { i, j, sign } => write!(f, "rmul({i},{j},{})", sign.symbol()),
            Elementary::LeftMultiply { i, j, sign } => write!(f, "lmul({i},{j},{})", sign.symbol()),
            Elementary::Inversion { i } => write!(f, "inv({i})"),
            Elementary::Transposition { i, j } => write!(f, "swap({i},{j})"),
        }
    }
}

impl FromStr for Elementary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::invalid(format!("malformed elementary generator id '{s}'"));
        let open = compact.find('(').ok_or_else(bad)?;
        if !compact.ends_with(')') {
            return Err(bad());
        }
        let kind = &compact[..open];
        let args: Vec<&str> = compact[open + 1..compact.len() - 1].split(',').collect();
        let idx = |k: usize| -> Result<usize> { args.get(k).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let sign = |k: usize| -> Result<Sign> {
            match args.get(k).copied() {
                Some("+") => Ok(Sign::Plus),
                Some("-") => Ok(Sign::Minus),
                _ => Err(bad()),
            }
        };
        match (kind, args.len()) {
            ("rmul", 3) => Elementary::right_multiply(idx(0)?, idx(1)?, sign(2)?),
            ("lmul", 3) => Elementary::left_multiply(idx(0)?, idx(1)?, sign(2)?),
            ("inv", 1) => Elementary::inversion(idx(0)?),
            ("swap", 2) => Elementary::transposition(idx(0)?, idx(1)?),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Elementary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Elementary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for e in Elementary::all(Rank::new(3).unwrap()) {
            assert_eq!(e.to_string().parse::<Elementary>().unwrap(), e);
        }
        assert!("rmul(1,1,+)".parse::<Elementary>().is_err());
        assert!("lmul(2,2,-)".parse::<Elementary>().is_err());
        assert!("rmul(1,2)".parse::<Elementary>().is_err());
        assert!("twist(1)".parse::<Elementary>().is_err());
    }

    #[test]
    fn generator_count() {
        // 4 N (N - 1) multiplications, N inversions, N (N - 1) / 2 swaps
        assert_eq!(Elementary::all(Rank::new(2).unwrap()).len(), 8 + 2 + 1);
        assert_eq!(Elementary::all(Rank::new(4).unwrap()).len(), 48 + 4 + 6);
    }

    #[test]
    fn rank_too_small_for_generator() {
        let e = Elementary::right_multiply(1, 3, Sign::Plus).unwrap();
        assert!(e.images(Rank::new(2).unwrap()).is_err());
    }
}
