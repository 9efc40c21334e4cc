//! Exact invariant suites with machine-readable results.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, CyclicWord, Rank};
use crate::outer_space::{
    base_candidates, kappa_ratio, length_cocycle_exact, lipschitz_ratio, lipschitz_ratio_over, ClassEnumeration,
    LengthRatio,
};
use crate::random::{random_automorphism, random_boundary, random_class, random_rose, random_word, random_word_in};
use crate::tree::{
    boundary_action, busemann, busemann_by_distances, corollary_check, corollary_witness, gromov_product,
    gromov_product_by_horofunctions, lemma_identities_by_distances, lemma_identities_check, GromovProduct, Point,
    TreePoint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    OuterSpace,
    Tree,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "outer-space" => Ok(Suite::OuterSpace),
            "tree" => Ok(Suite::Tree),
            "all" => Ok(Suite::All),
            _ => Err(Error::invalid(format!(
                "unknown suite '{s}' (expected algebra, outer-space, tree or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Algebra => "algebra",
            Suite::OuterSpace => "outer-space",
            Suite::Tree => "tree",
            Suite::All => "all",
        })
    }
}

/// Deliberate defects for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Drop the first petal from the Lipschitz maximum.
    CorruptCandidates,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrupt-candidates" => Ok(Fault::CorruptCandidates),
            _ => Err(Error::invalid(format!("unknown fault '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Tallies cases of one check.
struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn record_result(&mut self, r: Result<bool>, describe: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, describe),
            Err(e) => self.record(false, || format!("{}: {e}", describe())),
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn rank(n: usize) -> Rank {
    Rank::new(n).expect("ranks used by the suites are valid")
}

fn rng_for(seed: u64, check: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check);
    rng
}

/// Group laws of reduced words: associativity, inverses, identity.
pub fn check_word_laws(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 1);
    let mut t = Tally::new("word-group-laws");
    for _ in 0..cases {
        let r = rank(rng.random_range(2..=4));
        let (x, y, z) = (
            random_word_in(&mut rng, r, 0..16),
            random_word_in(&mut rng, r, 0..16),
            random_word_in(&mut rng, r, 0..16),
        );
        let ok = x.mul(&y).mul(&z) == x.mul(&y.mul(&z))
            && x.mul(&x.inverse()).is_empty()
            && x.inverse().inverse() == x
            && x.mul(&crate::freegroup::ReducedWord::empty()) == x;
        t.record(ok, || format!("x={x} y={y} z={z}"));
    }
    t.finish()
}

/// `φ ∘ φ⁻¹ = id`, `(φ ∘ ψ)(w) = φ(ψ(w))` and conjugation invariance of classes.
pub fn check_automorphisms(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    let mut t = Tally::new("automorphism-laws");
    for _ in 0..cases {
        let r = rank(rng.random_range(2..=4));
        let phi = random_automorphism(&mut rng, r, 6);
        let psi = random_automorphism(&mut rng, r, 6);
        let w = random_word(&mut rng, r, 10);
        let h = random_word(&mut rng, r, 5);
        let outcome = (|| -> Result<bool> {
            let inverse_ok = phi.compose(&phi.invert())?.same_images(&Automorphism::identity(r));
            let composed = phi.compose(&psi)?.apply(&w)? == phi.apply(&psi.apply(&w)?)?;
            let round_trip = phi.invert().apply(&phi.apply(&w)?)? == w;
            let conj = CyclicWord::from_word(&h.mul(&w).mul(&h.inverse())) == CyclicWord::from_word(&w);
            Ok(inverse_ok && composed && round_trip && conj)
        })();
        t.record_result(outcome, || format!("phi={} psi={} w={w}", phi.images_literal(), psi.images_literal()));
    }
    t.finish()
}

fn cocycle_ratio(phi: &Automorphism, g: &CyclicWord) -> Result<LengthRatio> {
    let (num, den) = length_cocycle_exact(phi, g)?;
    Ok(LengthRatio::new(num, den))
}

/// `σ(Φ∘Ψ, g) = σ(Φ, Ψ(g)) + σ(Ψ, g)` as an identity of exact ratios.
pub fn check_length_cocycle(seed: u64, n: usize, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 10 + n as u64);
    let mut t = Tally::new(if n == 2 { "length-cocycle-f2" } else { "length-cocycle-f3" });
    let r = rank(n);
    for _ in 0..cases {
        let phi = random_automorphism(&mut rng, r, 5);
        let psi = random_automorphism(&mut rng, r, 5);
        let g = random_class(&mut rng, r, 10);
        let outcome = (|| -> Result<bool> {
            let lhs = cocycle_ratio(&phi.compose(&psi)?, &g)?;
            let rhs = cocycle_ratio(&phi, &psi.apply_cyclic(&g)?)?.mul(&cocycle_ratio(&psi, &g)?);
            Ok(lhs == rhs)
        })();
        t.record_result(outcome, || format!("phi={} psi={} g={g}", phi.images_literal(), psi.images_literal()));
    }
    t.finish()
}

/// `σ(Φ, g) ≤ κ(Φ)` exactly.
pub fn check_sigma_below_kappa(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 20);
    let mut t = Tally::new("sigma-below-kappa");
    for _ in 0..cases {
        let r = rank(rng.random_range(2..=4));
        let phi = random_automorphism(&mut rng, r, 6);
        let g = random_class(&mut rng, r, 12);
        let outcome = cocycle_ratio(&phi, &g).map(|s| s <= kappa_ratio(&phi));
        t.record_result(outcome, || format!("phi={} g={g}", phi.images_literal()));
    }
    t.finish()
}

/// Candidate maximum equals the exhaustive maximum over classes up to `max_len`.
pub fn check_white_equality(seed: u64, n: usize, pairs: usize, max_len: usize, fault: Option<Fault>) -> CheckResult {
    let mut rng = rng_for(seed, 30 + n as u64);
    let mut t = Tally::new(if n == 2 { "white-equality-f2" } else { "white-equality-f3" });
    let r = rank(n);
    let classes = match ClassEnumeration::new(r, max_len) {
        Ok(c) => c,
        Err(e) => {
            t.record(false, || format!("enumeration: {e}"));
            return t.finish();
        }
    };
    let mut base = base_candidates(r);
    if fault == Some(Fault::CorruptCandidates) {
        base.remove(0);
    }
    for _ in 0..pairs {
        let steps = rng.random_range(0..6);
        let a = random_rose(&mut rng, r, steps);
        let b = random_rose(&mut rng, r, steps);
        let outcome = (|| -> Result<bool> { Ok(classes.max_ratio(&a, &b)? == lipschitz_ratio_over(&a, &b, &base)?) })();
        t.record_result(outcome, || {
            format!(
                "T=({:?}, {}) U=({:?}, {})",
                a.weights(),
                a.marking().images_literal(),
                b.weights(),
                b.marking().images_literal()
            )
        });
    }
    t.finish()
}

/// `d(T, V) ≤ d(T, U) + d(U, V)` and `d ≥ 0`, as exact ratios.
pub fn check_triangle(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 40);
    let mut t = Tally::new("lipschitz-triangle");
    for _ in 0..cases {
        let r = rank(rng.random_range(2..=3));
        let (a, b, c) = (
            random_rose(&mut rng, r, 3),
            random_rose(&mut rng, r, 3),
            random_rose(&mut rng, r, 3),
        );
        let outcome = (|| -> Result<bool> {
            let direct = lipschitz_ratio(&a, &c)?;
            let via = lipschitz_ratio(&a, &b)?.mul(&lipschitz_ratio(&b, &c)?);
            Ok(direct <= via && direct >= LengthRatio::one())
        })();
        t.record_result(outcome, || format!("{a:?} {b:?} {c:?}"));
    }
    t.finish()
}

/// `β(gh, ξ) = β(g, h·ξ) + β(h, ξ)`, `|β(g, ξ)| ≤ |g|`, and agreement with the
/// distance-level definition.
pub fn check_busemann_cocycle(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 50);
    let mut t = Tally::new("busemann-cocycle");
    let r = rank(2);
    for _ in 0..cases {
        let g = random_word_in(&mut rng, r, 0..12);
        let h = random_word_in(&mut rng, r, 0..12);
        let xi = random_boundary(&mut rng, r, 4, 4);
        let outcome = (|| -> Result<bool> {
            let lhs = busemann(&g.mul(&h), &xi)?;
            let rhs = busemann(&g, &boundary_action(&h, &xi)?)? + busemann(&h, &xi)?;
            let b = busemann(&g, &xi)?;
            Ok(lhs == rhs && b.unsigned_abs() as usize <= g.len() && b == busemann_by_distances(&g, &xi)?)
        })();
        t.record_result(outcome, || format!("g={g} h={h} xi={xi}"));
    }
    t.finish()
}

/// The two Gromov product identities hold with zero residual; every
/// hundredth case is also evaluated from distances alone.
pub fn check_lemma_identities(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 51);
    let mut t = Tally::new("gromov-identities");
    let r = rank(2);
    for k in 0..cases {
        let g = random_word_in(&mut rng, r, 0..12);
        let xi = random_boundary(&mut rng, r, 5, 5);
        let outcome = (|| -> Result<bool> {
            let fast = lemma_identities_check(&g, &xi)?.is_exact();
            Ok(fast && (k % 100 != 0 || lemma_identities_by_distances(&g, &xi)?.is_exact()))
        })();
        t.record_result(outcome, || format!("g={g} xi={xi}"));
    }
    t.finish()
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    let r = rank(2);
    if rng.random_bool(0.5) {
        Point::Vertex(TreePoint(random_word_in(rng, r, 0..10)))
    } else {
        Point::Boundary(random_boundary(rng, r, 4, 4))
    }
}

fn at_least(p: GromovProduct, q: GromovProduct) -> bool {
    match (p, q) {
        (GromovProduct::Infinite, _) => true,
        (GromovProduct::Finite(_), GromovProduct::Infinite) => false,
        (GromovProduct::Finite(a), GromovProduct::Finite(b)) => a >= b,
    }
}

/// `(x|y) ≥ min((x|z), (y|z))` exactly, for vertices and boundary points.
pub fn check_four_point(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 52);
    let mut t = Tally::new("four-point");
    for _ in 0..cases {
        let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        let outcome = (|| -> Result<bool> {
            let xy = gromov_product(&x, &y)?;
            let xz = gromov_product(&x, &z)?;
            let yz = gromov_product(&y, &z)?;
            let bound = if at_least(xz, yz) { yz } else { xz };
            Ok(at_least(xy, bound))
        })();
        t.record_result(outcome, || format!("{x:?} {y:?} {z:?}"));
    }
    t.finish()
}

/// The Gromov product from horofunctions equals the common prefix.
pub fn check_horofunction_products(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 53);
    let mut t = Tally::new("horofunction-products");
    let r = rank(2);
    for _ in 0..cases {
        let x = random_boundary(&mut rng, r, 5, 4);
        let y = random_boundary(&mut rng, r, 5, 4);
        let outcome = (|| -> Result<bool> {
            match gromov_product(&Point::Boundary(x.clone()), &Point::Boundary(y.clone()))? {
                GromovProduct::Finite(p) => Ok(gromov_product_by_horofunctions(&x, &y, p as usize + 2)? == p as i64),
                GromovProduct::Infinite => Ok(true),
            }
        })();
        t.record_result(outcome, || format!("x={x} y={y}"));
    }
    t.finish()
}

/// `max(β(g,x), β(g,y)) ≥ κ(g) − 2(x|y)` with equality attained by a short `g`.
pub fn check_corollary(seed: u64, cases: usize) -> CheckResult {
    let mut rng = rng_for(seed, 54);
    let mut t = Tally::new("busemann-lower-bound");
    let r = rank(2);
    while t.cases < cases {
        let x = random_boundary(&mut rng, r, 3, 3);
        let y = random_boundary(&mut rng, r, 3, 3);
        let distinct = gromov_product(&Point::Boundary(x.clone()), &Point::Boundary(y.clone()))
            .map(|p| !p.is_infinite())
            .unwrap_or(false);
        if !distinct {
            continue;
        }
        let outcome = (|| -> Result<bool> {
            for _ in 0..10 {
                let g = random_word_in(&mut rng, r, 0..10);
                let (lhs, rhs) = corollary_check(&g, &x, &y)?;
                if lhs < rhs {
                    return Ok(false);
                }
            }
            Ok(corollary_witness(&x, &y, r, 6)?.is_some())
        })();
        t.record_result(outcome, || format!("x={x} y={y}"));
    }
    t.finish()
}

/// Runs a suite at its full sizes.
pub fn run_suite(suite: Suite, seed: u64, fault: Option<Fault>) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Algebra | Suite::All) {
        checks.push(check_word_laws(seed, 10_000));
        checks.push(check_automorphisms(seed, 2_000));
    }
    if matches!(suite, Suite::OuterSpace | Suite::All) {
        checks.push(check_length_cocycle(seed, 2, 10_000));
        checks.push(check_length_cocycle(seed, 3, 10_000));
        checks.push(check_sigma_below_kappa(seed, 10_000));
        checks.push(check_white_equality(seed, 2, 200, 12, fault));
        checks.push(check_white_equality(seed, 3, 50, 8, fault));
        checks.push(check_triangle(seed, 2_000));
    }
    if matches!(suite, Suite::Tree | Suite::All) {
        checks.push(check_busemann_cocycle(seed, 10_000));
        checks.push(check_lemma_identities(seed, 100_000));
        checks.push(check_four_point(seed, 100_000));
        checks.push(check_horofunction_products(seed, 2_000));
        checks.push(check_corollary(seed, 100));
    }
    VerifyReport {
        suite,
        seed,
        passed: checks.iter().all(CheckResult::passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in ["algebra", "outer-space", "tree", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(check_word_laws(1, 500).passed());
        assert!(check_automorphisms(1, 200).passed());
        assert!(check_length_cocycle(1, 3, 500).passed());
        assert!(check_white_equality(1, 2, 20, 8, None).passed());
        assert!(check_four_point(1, 2_000).passed());
        assert!(check_corollary(1, 10).passed());
    }

    #[test]
    fn corrupted_candidates_are_caught() {
        let r = check_white_equality(1, 2, 50, 8, Some(Fault::CorruptCandidates));
        assert!(!r.passed());
        assert_eq!(r.name, "white-equality-f2");
        assert!(r.first_failure.is_some());
    }
}
