use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

use super::cyclic::{cyclic_trim, CyclicWord};
use super::elementary::Elementary;
use super::letter::{Letter, Rank};
use super::word::{push_reduced, ReducedWord};

/// An automorphism of `F_N`, kept together with its inverse.
///
/// Automorphisms are only ever built as compositions of [`Elementary`]
/// generators, so the inverse is known exactly. The trace lists those
/// generators in composition order: trace `[t1, t2, ..., tk]` is
/// `t1 ∘ t2 ∘ ... ∘ tk`, so `tk` acts first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    rank: Rank,
    forward: Vec<ReducedWord>,
    inverse: Vec<ReducedWord>,
    trace: Vec<Elementary>,
}

/// Substitutes the images of each letter into `out`, reducing as it goes.
#[inline]
fn substitute(images: &[ReducedWord], w: &[Letter], out: &mut Vec<Letter>) {
    for &x in w {
        if x.is_inverse() {
            // (a_i^{-1})'s image is the inverse of a_i's image
            for &y in images[x.index()].letters().iter().rev() {
                push_reduced(out, y.inverse());
            }
        } else {
            for &y in images[x.index()].letters() {
                push_reduced(out, y);
            }
        }
    }
}

impl Automorphism {
    pub fn identity(rank: Rank) -> Self {
        let basis: Vec<ReducedWord> = rank
            .letters()
            .filter(|l| !l.is_inverse())
            .map(ReducedWord::letter)
            .collect();
        Automorphism {
            rank,
            forward: basis.clone(),
            inverse: basis,
            trace: Vec::new(),
        }
    }

    pub fn elementary(rank: Rank, e: Elementary) -> Result<Self> {
        Ok(Automorphism {
            rank,
            forward: e.images(rank)?,
            inverse: e.inverse().images(rank)?,
            trace: vec![e],
        })
    }

    /// `t1 ∘ t2 ∘ ... ∘ tk` for trace `[t1, ..., tk]`.
    pub fn from_trace(rank: Rank, trace: &[Elementary]) -> Result<Self> {
        let mut phi = Automorphism::identity(rank);
        for &e in trace.iter().rev() {
            phi = Automorphism::elementary(rank, e)?.compose(&phi)?;
        }
        Ok(phi)
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Images `φ(a_1), ..., φ(a_N)`.
    pub fn images(&self) -> &[ReducedWord] {
        &self.forward
    }

    /// Images under the inverse automorphism.
    pub fn inverse_images(&self) -> &[ReducedWord] {
        &self.inverse
    }

    pub fn trace(&self) -> &[Elementary] {
        &self.trace
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(i, w)| w.len() == 1 && w.letters()[0].index() == i && !w.letters()[0].is_inverse())
    }

    fn check_word(&self, w: &ReducedWord) -> Result<()> {
        w.check_rank(self.rank).map_err(|e| match e {
            Error::InvalidInput(m) => Error::invalid(format!("rank mismatch: {m}")),
            other => other,
        })
    }

    /// `φ(w)`, freely reduced.
    pub fn apply(&self, w: &ReducedWord) -> Result<ReducedWord> {
        self.check_word(w)?;
        Ok(self.apply_unchecked(w.letters()))
    }

    pub(crate) fn apply_unchecked(&self, w: &[Letter]) -> ReducedWord {
        let mut out = Vec::with_capacity(w.len() * 2);
        substitute(&self.forward, w, &mut out);
        ReducedWord::from_reduced_unchecked(out)
    }

    /// Image of a conjugacy class.
    pub fn apply_cyclic(&self, g: &CyclicWord) -> Result<CyclicWord> {
        let w = g.to_word();
        self.check_word(&w)?;
        Ok(CyclicWord::from_word(&self.apply_unchecked(w.letters())))
    }

    /// Applies `φ` to a cyclically reduced word and cyclically reduces the result
    /// into `out` without canonical rotation. Used by the walk's hot loop.
    pub(crate) fn apply_cyclic_into(&self, w: &[Letter], out: &mut Vec<Letter>) {
        out.clear();
        substitute(&self.forward, w, out);
        let k = cyclic_trim(out);
        if k > 0 {
            let n = out.len();
            out.copy_within(k..n - k, 0);
            out.truncate(n - 2 * k);
        }
    }

    /// `‖φ(g)‖` for a conjugacy class `g`.
    pub fn image_length(&self, g: &CyclicWord) -> Result<usize> {
        let mut out = Vec::new();
        let w = g.to_word();
        self.check_word(&w)?;
        self.apply_cyclic_into(w.letters(), &mut out);
        Ok(out.len())
    }

    /// `φ ∘ ψ`.
    pub fn compose(&self, psi: &Automorphism) -> Result<Automorphism> {
        if self.rank != psi.rank {
            return Err(Error::invalid(format!(
                "rank mismatch in compose: {} vs {}",
                self.rank, psi.rank
            )));
        }
        let forward: Vec<ReducedWord> = psi.forward.iter().map(|w| self.apply_unchecked(w.letters())).collect();
        let psi_inv = psi.invert();
        let inverse: Vec<ReducedWord> = self
            .inverse
            .iter()
            .map(|w| psi_inv.apply_unchecked(w.letters()))
            .collect();
        let mut trace = self.trace.clone();
        trace.extend_from_slice(&psi.trace);
        let out = Automorphism {
            rank: self.rank,
            forward,
            inverse,
            trace,
        };
        debug_assert!(out.round_trip_holds(), "compose broke the inverse pairing");
        Ok(out)
    }

    pub fn invert(&self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            trace: self.trace.iter().rev().map(|e| e.inverse()).collect(),
        }
    }

    /// Forward then inverse images (and vice versa) return every basis letter.
    pub fn round_trip_holds(&self) -> bool {
        let inv = self.invert();
        self.rank.letters().filter(|l| !l.is_inverse()).all(|x| {
            let w = [x];
            inv.apply_unchecked(&self.apply_unchecked(&w).into_letters()).letters() == w
                && self.apply_unchecked(&inv.apply_unchecked(&w).into_letters()).letters() == w
        })
    }

    /// Same images as `other` (traces may differ).
    pub fn same_images(&self, other: &Automorphism) -> bool {
        self.forward == other.forward && self.inverse == other.inverse
    }

    /// Parses `"a>ab; b>b"`; generators not mentioned are fixed.
    pub fn parse_images(s: &str, rank: Rank) -> Result<Vec<ReducedWord>> {
        let mut images: Vec<Option<ReducedWord>> = vec![None; rank.get()];
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part
                .split_once('>')
                .ok_or_else(|| Error::invalid(format!("expected 'x>word' in '{part}'")))?;
            let x = Letter::from_char(lhs.trim().chars().next().unwrap_or(' '))?;
            if lhs.trim().chars().count() != 1 || x.is_inverse() || !x.within(rank) {
                return Err(Error::invalid(format!("'{}' is not a basis letter of rank {rank}", lhs.trim())));
            }
            if images[x.index()].is_some() {
                return Err(Error::invalid(format!("image of '{x}' given twice")));
            }
            images[x.index()] = Some(ReducedWord::parse(rhs, rank)?);
        }
        Ok(images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.unwrap_or_else(|| ReducedWord::letter(Letter::from_code(2 * i as u8))))
            .collect())
    }

    /// Finds a composition of at most `max_depth` elementary generators with the
    /// given images (breadth first, so the trace found is a shortest one).
    pub fn search_images(rank: Rank, target: &[ReducedWord], max_depth: usize) -> Result<Automorphism> {
        if target.len() != rank.get() {
            return Err(Error::invalid(format!(
                "expected {} images, got {}",
                rank.get(),
                target.len()
            )));
        }
        for w in target {
            w.check_rank(rank)?;
        }
        let gens: Vec<Automorphism> = Elementary::all(rank)
            .into_iter()
            .map(|e| Automorphism::elementary(rank, e))
            .collect::<Result<_>>()?;
        let start = Automorphism::identity(rank);
        if start.forward == target {
            return Ok(start);
        }
        let mut seen: HashMap<Vec<ReducedWord>, ()> = HashMap::new();
        seen.insert(start.forward.clone(), ());
        let mut frontier = VecDeque::from([start]);
        for _ in 0..max_depth {
            let mut next = VecDeque::new();
            while let Some(phi) = frontier.pop_front() {
                for g in &gens {
                    let cand = phi.compose(g)?;
                    if cand.forward == target {
                        return Ok(cand);
                    }
                    if seen.insert(cand.forward.clone(), ()).is_none() {
                        next.push_back(cand);
                    }
                }
            }
            frontier = next;
        }
        Err(Error::invalid(format!(
            "no composition of ≤ {max_depth} elementary generators has images [{}]; supply a generator trace",
            target.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
        )))
    }

    /// Parses an automorphism literal `"a>ab; b>b"` by searching a generator trace.
    pub fn parse_literal(s: &str, rank: Rank, max_depth: usize) -> Result<Automorphism> {
        let images = Automorphism::parse_images(s, rank)?;
        Automorphism::search_images(rank, &images, max_depth)
    }

    /// Human-readable images, e.g. `a>ab; b>b`.
    pub fn images_literal(&self) -> String {
        self.forward
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}>{}", Letter::from_code(2 * i as u8), w))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism({})", self.images_literal())
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.images_literal())
    }
}
