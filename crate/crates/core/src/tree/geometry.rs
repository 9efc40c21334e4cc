use std::fmt;

use crate::error::{Error, Result};
use crate::freegroup::{common_prefix, ReducedWord};

use super::boundary::{undecidable, BoundaryPoint};

/// A vertex `g·o` of the Cayley tree; the basepoint `o` is the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreePoint(pub ReducedWord);

impl TreePoint {
    pub fn origin() -> Self {
        TreePoint(ReducedWord::empty())
    }

    pub fn word(&self) -> &ReducedWord {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl From<ReducedWord> for TreePoint {
    fn from(w: ReducedWord) -> Self {
        TreePoint(w)
    }
}

/// A vertex or a boundary point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point {
    Vertex(TreePoint),
    Boundary(BoundaryPoint),
}

impl From<TreePoint> for Point {
    fn from(p: TreePoint) -> Self {
        Point::Vertex(p)
    }
}

impl From<BoundaryPoint> for Point {
    fn from(p: BoundaryPoint) -> Self {
        Point::Boundary(p)
    }
}

/// A Gromov product; equal boundary points have product `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GromovProduct {
    Finite(u64),
    Infinite,
}

impl GromovProduct {
    pub fn finite(self) -> Option<u64> {
        match self {
            GromovProduct::Finite(v) => Some(v),
            GromovProduct::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == GromovProduct::Infinite
    }
}

impl fmt::Display for GromovProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GromovProduct::Finite(v) => write!(f, "{v}"),
            GromovProduct::Infinite => write!(f, "inf"),
        }
    }
}

pub fn tree_distance(u: &TreePoint, v: &TreePoint) -> u64 {
    let c = common_prefix(u.0.letters(), v.0.letters());
    (u.depth() + v.depth() - 2 * c) as u64
}

/// Common prefix of a finite word and an infinite one.
pub fn prefix_with_boundary(w: &ReducedWord, xi: &BoundaryPoint) -> Result<usize> {
    for (k, &x) in w.letters().iter().enumerate() {
        match xi.letter(k) {
            Some(y) if y == x => continue,
            Some(_) => return Ok(k),
            None => return Err(undecidable(k, "common prefix with a truncated boundary point")),
        }
    }
    Ok(w.len())
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn boundary_prefix(x: &BoundaryPoint, y: &BoundaryPoint) -> Result<GromovProduct> {
    // two eventually periodic words that agree this long agree forever
    let horizon = match (x, y) {
        (
            BoundaryPoint::Periodic {
                preperiod: p1,
                period: q1,
            },
            BoundaryPoint::Periodic {
                preperiod: p2,
                period: q2,
            },
        ) => Some(p1.len().max(p2.len()) + lcm(q1.len(), q2.len())),
        _ => None,
    };
    let mut k = 0;
    loop {
        if horizon == Some(k) {
            return Ok(GromovProduct::Infinite);
        }
        match (x.letter(k), y.letter(k)) {
            (Some(a), Some(b)) if a == b => k += 1,
            (Some(_), Some(_)) => return Ok(GromovProduct::Finite(k as u64)),
            _ => return Err(undecidable(k, "Gromov product of boundary points")),
        }
    }
}

/// `(x|y)_o`: the length of the common prefix.
pub fn gromov_product(x: &Point, y: &Point) -> Result<GromovProduct> {
    let fin = |v: usize| Ok(GromovProduct::Finite(v as u64));
    match (x, y) {
        (Point::Vertex(u), Point::Vertex(v)) => fin(common_prefix(u.0.letters(), v.0.letters())),
        (Point::Vertex(u), Point::Boundary(xi)) | (Point::Boundary(xi), Point::Vertex(u)) => {
            fin(prefix_with_boundary(&u.0, xi)?)
        }
        (Point::Boundary(a), Point::Boundary(b)) => boundary_prefix(a, b),
    }
}

/// `(x|y)_o = ½(d(x,o) + d(o,y) − d(x,y))`, with the distance computed as the
/// length of the reduced word `x⁻¹ y`.
pub fn gromov_product_by_distances(x: &TreePoint, y: &TreePoint) -> u64 {
    let d = x.0.inverse().mul(&y.0).len();
    ((x.depth() + y.depth() - d) / 2) as u64
}

/// Horofunction of `ξ` normalized at `o`: `h_ξ(z) = |z| − 2 (z|ξ)_o`.
pub fn horofunction(xi: &BoundaryPoint, z: &TreePoint) -> Result<i64> {
    Ok(z.depth() as i64 - 2 * prefix_with_boundary(&z.0, xi)? as i64)
}

/// `−½ inf_z (h_x(z) + h_y(z))` with `z` ranging over the first `depth`
/// vertices of both rays; the infimum over the tree is attained on the
/// geodesic joining `x` and `y`.
pub fn gromov_product_by_horofunctions(x: &BoundaryPoint, y: &BoundaryPoint, depth: usize) -> Result<i64> {
    let mut best = i64::MAX;
    for ray in [x, y] {
        for k in 0..=depth {
            let z = TreePoint(ray.prefix(k)?);
            best = best.min(horofunction(x, &z)? + horofunction(y, &z)?);
        }
    }
    Ok(-best / 2)
}

/// `β(g, ξ) = h_ξ(g⁻¹·o) = |g| − 2 (g⁻¹|ξ)_o`.
pub fn busemann(g: &ReducedWord, xi: &BoundaryPoint) -> Result<i64> {
    horofunction(xi, &TreePoint(g.inverse()))
}

/// `lim_k d(g⁻¹o, ξ_k) − d(o, ξ_k)` evaluated at a depth past which the
/// difference is constant, from distances alone.
pub fn busemann_by_distances(g: &ReducedWord, xi: &BoundaryPoint) -> Result<i64> {
    let k = g.len() + 1;
    let far = xi.prefix(k)?;
    let d = g.mul(&far).len() as i64;
    Ok(d - k as i64)
}

pub fn boundary_action(g: &ReducedWord, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
    xi.act(g)
}

/// Distance from `w` to the geodesic ray `[o, ξ)`.
pub fn tracking_distance(w: &TreePoint, xi: &BoundaryPoint) -> Result<u64> {
    Ok((w.depth() - prefix_with_boundary(&w.0, xi)?) as u64)
}

/// Residuals of the two tree identities
/// `(go|gξ)_o = ½(κ(g) + β(g,ξ))` and `(go|ξ)_o = ½(κ(g) − β(g⁻¹,ξ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub first: f64,
    pub second: f64,
}

impl IdentityResiduals {
    pub fn is_exact(&self) -> bool {
        self.first == 0.0 && self.second == 0.0
    }
}

pub fn lemma_identities_check(g: &ReducedWord, xi: &BoundaryPoint) -> Result<IdentityResiduals> {
    if xi.is_truncated() {
        return Err(Error::invalid("identity check needs an eventually periodic boundary point"));
    }
    let kappa = g.len() as i64;
    let g_xi = boundary_action(g, xi)?;
    let first = 2 * prefix_with_boundary(g, &g_xi)? as i64 - (kappa + busemann(g, xi)?);
    let second = 2 * prefix_with_boundary(g, xi)? as i64 - (kappa - busemann(&g.inverse(), xi)?);
    Ok(IdentityResiduals {
        first: first as f64 / 2.0,
        second: second as f64 / 2.0,
    })
}

/// The same residuals with every Gromov product and Busemann value evaluated
/// from distances to deep vertices along the rays.
pub fn lemma_identities_by_distances(g: &ReducedWord, xi: &BoundaryPoint) -> Result<IdentityResiduals> {
    let kappa = g.len() as i64;
    let deep = 2 * g.len() + 2;
    let g_pt = TreePoint(g.clone());
    let g_xi = TreePoint(g.mul(&xi.prefix(deep)?));
    let xi_pt = TreePoint(xi.prefix(deep)?);
    let first = 2 * gromov_product_by_distances(&g_pt, &g_xi) as i64 - (kappa + busemann_by_distances(g, xi)?);
    let second = 2 * gromov_product_by_distances(&g_pt, &xi_pt) as i64
        - (kappa - busemann_by_distances(&g.inverse(), xi)?);
    Ok(IdentityResiduals {
        first: first as f64 / 2.0,
        second: second as f64 / 2.0,
    })
}

/// `max(β(g,x), β(g,y))` and the lower bound `κ(g) − 2(x|y)_o`.
pub fn corollary_check(g: &ReducedWord, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<(i64, i64)> {
    let product = match boundary_prefix(x, y)? {
        GromovProduct::Finite(v) => v as i64,
        GromovProduct::Infinite => return Err(Error::invalid("corollary check needs distinct boundary points")),
    };
    let lhs = busemann(g, x)?.max(busemann(g, y)?);
    Ok((lhs, g.len() as i64 - 2 * product))
}

/// A word of length ≤ `max_len` attaining equality in [`corollary_check`].
pub fn corollary_witness(
    x: &BoundaryPoint,
    y: &BoundaryPoint,
    rank: crate::freegroup::Rank,
    max_len: usize,
) -> Result<Option<ReducedWord>> {
    let mut frontier = vec![ReducedWord::empty()];
    for _ in 0..=max_len {
        let mut next = Vec::new();
        for g in &frontier {
            let (lhs, rhs) = corollary_check(g, x, y)?;
            if lhs == rhs {
                return Ok(Some(g.clone()));
            }
            for l in rank.letters() {
                if g.letters().last() != Some(&l.inverse()) {
                    next.push(g.mul(&ReducedWord::letter(l)));
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    fn v(s: &str) -> Point {
        Point::Vertex(TreePoint(w(s)))
    }

    fn bp(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(tree_distance(&TreePoint::origin(), &TreePoint(w("ab"))), 2);
        assert_eq!(tree_distance(&TreePoint(w("aa")), &TreePoint(w("ab"))), 2);
    }

    #[test]
    fn gromov_examples() {
        assert_eq!(gromov_product(&v("aab"), &v("aba")).unwrap(), GromovProduct::Finite(1));
        assert_eq!(gromov_product(&v("abc"), &v("abc")).unwrap(), GromovProduct::Finite(3));
        let x = Point::Boundary(bp("per:a"));
        let y = Point::Boundary(bp("per:ab"));
        assert_eq!(gromov_product(&x, &y).unwrap(), GromovProduct::Finite(1));
        assert_eq!(gromov_product(&x, &x).unwrap(), GromovProduct::Infinite);
        let t = Point::Boundary(bp("prefix:aaab depth:3"));
        assert!(matches!(gromov_product(&t, &x), Err(Error::Undecidable { .. })));
        assert_eq!(gromov_product(&t, &y).unwrap(), GromovProduct::Finite(1));
    }

    #[test]
    fn busemann_examples() {
        assert_eq!(busemann(&w("A"), &bp("per:a")).unwrap(), -1);
        assert_eq!(busemann(&w("b"), &bp("per:a")).unwrap(), 1);
        assert_eq!(horofunction(&bp("per:a"), &TreePoint(w("a"))).unwrap(), -1);
    }

    #[test]
    fn tracking_examples() {
        let a = bp("per:a");
        assert_eq!(tracking_distance(&TreePoint(w("ab")), &a).unwrap(), 1);
        assert_eq!(tracking_distance(&TreePoint(w("aaa")), &a).unwrap(), 0);
    }

    #[test]
    fn identity_examples() {
        let r = lemma_identities_check(&w("a"), &bp("per:b")).unwrap();
        assert!(r.is_exact());
        assert!(lemma_identities_check(&ReducedWord::empty(), &bp("per:b")).unwrap().is_exact());
        // (ao|a·b^∞)_o = 1, κ = 1, β(a, b^∞) = 1
        let g_xi = boundary_action(&w("a"), &bp("per:b")).unwrap();
        assert_eq!(prefix_with_boundary(&w("a"), &g_xi).unwrap(), 1);
        assert_eq!(busemann(&w("a"), &bp("per:b")).unwrap(), 1);
    }

    #[test]
    fn corollary_has_witness() {
        let (x, y) = (bp("per:a"), bp("per:ab"));
        let g = corollary_witness(&x, &y, crate::freegroup::Rank::new(2).unwrap(), 6)
            .unwrap()
            .expect("equality is attained");
        let (lhs, rhs) = corollary_check(&g, &x, &y).unwrap();
        assert_eq!(lhs, rhs);
    }
}
