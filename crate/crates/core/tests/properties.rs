use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use pillow_core::graph::adjacency;
use pillow_core::measure::{blowup_measure, pushforward_x, TileMeasure};
use pillow_core::metric::{graph_metric, qs_distortion, symmetrize, MetricMatrix, SymmetrizeMode};
use pillow_core::modulus::{solve_modulus, CurveEndpoints, ModulusProblem, Network};
use pillow_core::rule::{Sign, SIDE};
use pillow_core::{Alphabet, CentralEdgePolicy, GroupElement, Letter, ReplacementGraph, Word};

fn word(alphabet: Alphabet, len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..alphabet.size(), len)
        .prop_map(move |pos| Word::new(pos.into_iter().map(|p| alphabet.letter(p)).collect()))
}

fn group(len: usize) -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(any::<bool>(), len).prop_map(GroupElement::from_bits)
}

type Q = (i64, i64);

/// Branch chart of a letter on one axis, `t ↦ (c + t)/3` or `(2 - t)/3`.
fn chart(pos: i64, t: Q) -> Q {
    let (num, den) = t;
    if pos == 1 {
        (2 * den - num, 3 * den)
    } else {
        (pos * den + num, 3 * den)
    }
}

/// Applies the charts of `w` outermost first to `t`, by evaluating the
/// innermost chart first.
fn evaluate(w: &Word, axis: usize, t: Q) -> Q {
    w.letters()
        .iter()
        .rev()
        .fold(t, |acc, l| chart(l.cell()[axis] as i64, acc))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn square_of_a_word_matches_its_folding_chart(w in (1usize..=6).prop_flat_map(|n| word(Alphabet::Pillow, n))) {
        let sq = w.square();
        let scale = 3i64.pow(w.len() as u32);
        for axis in 0..2 {
            let (a, da) = evaluate(&w, axis, (1, 4));
            let (b, db) = evaluate(&w, axis, (3, 4));
            let (m, dm) = evaluate(&w, axis, (1, 2));
            prop_assert_eq!((m * scale).div_euclid(dm) as u64, sq.index(axis));
            let increasing = a * db < b * da;
            prop_assert_eq!(increasing, sq.orientation[axis] == Sign::Plus);
            let middles = w.letters().iter().filter(|l| l.cell()[axis] == 1).count();
            prop_assert_eq!(sq.orientation[axis] == Sign::Minus, middles % 2 == 1);
        }
    }

    #[test]
    fn squares_agree_iff_projections_agree(
        (w, v, g) in (1usize..=5).prop_flat_map(|n| (word(Alphabet::Pillow, n), word(Alphabet::Pillow, n), group(n)))
    ) {
        prop_assert_eq!(w.square().same_cell(&v.square()), w.project() == v.project());
        let f = w.flip(&g).unwrap();
        prop_assert!(f.square().same_cell(&w.square()));
        prop_assert_eq!(f.project(), w.project());
    }

    #[test]
    fn flip_laws((w, g, h) in (1usize..=6).prop_flat_map(|n| (word(Alphabet::Pillow, n), group(n), group(n)))) {
        prop_assert_eq!(w.flip(&g).unwrap().flip(&h).unwrap(), w.flip(&g.compose(&h)).unwrap());
        prop_assert_eq!(w.flip(&g).unwrap().flip(&g).unwrap(), w.clone());
        prop_assert_eq!(w.flip(&g).unwrap().shift().unwrap(), w.shift().unwrap().flip(&g.shift()).unwrap());
    }

    #[test]
    fn sections_lift_grid_words((u, g) in (1usize..=6).prop_flat_map(|n| (word(Alphabet::Grid, n), group(n)))) {
        let s = Word::section(&u, &g).unwrap();
        prop_assert_eq!(s.project(), u.clone());
        prop_assert_eq!(s.square().same_cell(&u.square()), true);
        prop_assert_eq!(s.center_count(), u.center_count());
    }

    #[test]
    fn adjacency_is_symmetric((w, v) in (1usize..=4).prop_flat_map(|n| (word(Alphabet::Pillow, n), word(Alphabet::Pillow, n)))) {
        prop_assume!(w != v);
        prop_assert_eq!(adjacency(&w, &v).unwrap(), adjacency(&v, &w).unwrap());
    }

    #[test]
    fn pushforward_conserves_mass(masses in prop::collection::vec(0i64..20, 100)) {
        prop_assume!(masses.iter().any(|&m| m > 0));
        let m = TileMeasure::new(
            Alphabet::Pillow,
            2,
            masses.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        ).unwrap();
        prop_assert_eq!(pushforward_x(&m).total(), m.total());
        let coarse = pushforward_x(&m.coarsen().unwrap());
        prop_assert_eq!(pushforward_x(&m).at_level(1), coarse.weights);
    }
}

#[test]
fn grid_words_have_distinct_squares() {
    for n in 1..=4u32 {
        let mut seen = std::collections::HashSet::new();
        for i in 0..9usize.pow(n) {
            let sq = Word::from_index(Alphabet::Grid, n as usize, i).square();
            assert!(seen.insert((sq.x, sq.y)), "level {n}");
        }
        assert_eq!(seen.len() as u64, SIDE.pow(2 * n));
    }
}

#[test]
fn group_laws_exhaustive() {
    for n in 1..=3usize {
        let elements: Vec<GroupElement> = GroupElement::all(n).collect();
        for i in 0..10usize.pow(n as u32) {
            let w = Word::from_index(Alphabet::Pillow, n, i);
            for g in &elements {
                for h in &elements {
                    assert_eq!(w.flip(g).unwrap().flip(h).unwrap(), w.flip(&g.compose(h)).unwrap());
                }
            }
        }
    }
    let g: GroupElement = "1011".parse().unwrap();
    assert_eq!(g.compose(&g), GroupElement::identity(4));
}

#[test]
fn projection_is_a_homomorphism_onto_the_grid() {
    for n in 1..=4 {
        let g = ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap();
        let grid = ReplacementGraph::grid(n).unwrap();
        let mut covered = std::collections::HashSet::new();
        for e in g.edges() {
            let (a, b) = (g.cell(e.u as usize), g.cell(e.v as usize));
            let l1 = a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
            assert!(l1 <= 1, "level {n}: {e:?}");
            if l1 == 1 {
                covered.insert((a.min(b), a.max(b)));
            }
        }
        assert_eq!(covered.len(), grid.edge_count(), "level {n}");
    }
}

#[test]
fn ball_growth_is_regular() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 2..=5u32 {
        let g = ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap();
        for _ in 0..10 {
            let v = rng.random_range(0..g.vertex_count());
            for m in 0..n {
                let r = 3u32.pow(m);
                let q = g.ball(v, r).len() as f64 / 10f64.powi(m as i32);
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
    }
    assert!(lo >= 1.0 / 25.0 && hi <= 25.0, "{lo} {hi}");
}

#[test]
fn nested_middle_intervals_lose_mass_geometrically() {
    let n = 5;
    let m = TileMeasure::uniform(Alphabet::Pillow, n).unwrap();
    let w = pushforward_x(&m);
    let total = w.total();
    let ratio = BigRational::new(2.into(), 5.into());
    let mut expected = total.clone();
    // depth m middle interval: index (3^m - 1)/2 at level m
    for depth in 1..=n {
        expected = &expected * &ratio;
        let weights = w.at_level(depth);
        let mid = (3usize.pow(depth) - 1) / 2;
        assert_eq!(weights[mid], expected, "depth {depth}");
    }
    let lebesgue = BigRational::new(1.into(), 3.into());
    assert!(ratio > lebesgue);
    assert!(total == BigRational::one());
    assert!(!expected.is_zero());
}

#[test]
fn uniform_blowups_are_fixed() {
    let m = TileMeasure::uniform(Alphabet::Pillow, 4).unwrap();
    for w in ["5", "0", "37", "505"] {
        let b = blowup_measure(&m, &w.parse().unwrap()).unwrap();
        let expected = TileMeasure::uniform(Alphabet::Pillow, 4 - w.len() as u32).unwrap();
        assert_eq!(b, expected, "{w}");
    }
}

fn small_graph() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (4usize..=8).prop_flat_map(|n| {
        let spine: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        prop::collection::vec((0..n as u32, 0..n as u32), 0..8).prop_map(move |extra| {
            let mut edges = spine.clone();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            (n, edges)
        })
    })
}

fn modulus(net: &Network, ends: CurveEndpoints, p: f64) -> (f64, f64) {
    let r = solve_modulus(&ModulusProblem::new(net, ends, p).with_tolerance(1e-7)).unwrap();
    assert!(r.converged);
    (r.value_lower, r.value_upper)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modulus_certificates((n, edges) in small_graph(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let net = Network::new(n, edges).unwrap();
        let ends = CurveEndpoints::single(0, n - 1).unwrap();
        let (lo, hi) = modulus(&net, ends.clone(), p);
        prop_assert!(lo <= hi && lo > 0.0);

        let (dlo, dhi) = modulus(&net.doubled(), ends.clone(), p);
        prop_assert!(((dlo + dhi) / (lo + hi) - 2.0).abs() < 1e-6);

        let perm: Vec<usize> = (0..n).rev().collect();
        let (plo, phi) = modulus(&net.permuted(&perm), CurveEndpoints::single(n - 1, 0).unwrap(), p);
        prop_assert!(plo <= hi * (1.0 + 1e-6) && lo <= phi * (1.0 + 1e-6));

        let wide = CurveEndpoints::new(vec![0], vec![n - 2, n - 1]).unwrap();
        let (wlo, _) = modulus(&net, wide, p);
        prop_assert!(hi <= wlo * (1.0 + 1e-6) + 1e-12);
    }
}

/// `d + |f(i) - f(j)|`, still a metric and in general not flip-invariant.
fn perturbed(d: &MetricMatrix, f: &[f64]) -> MetricMatrix {
    let n = d.len();
    let upper: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j) + (f[i] - f[j]).abs())
        .collect();
    MetricMatrix::from_upper(d.universe().clone(), upper).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symmetrize_is_idempotent_and_invariant(f in prop::collection::vec(0u8..4, 100)) {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        let base = graph_metric(&g).unwrap();
        let f: Vec<f64> = f.into_iter().map(|x| x as f64 * 0.25).collect();
        let d = perturbed(&base, &f);
        let s = symmetrize(&d, SymmetrizeMode::Exact).unwrap();
        prop_assert_eq!(symmetrize(&s, SymmetrizeMode::Exact).unwrap(), s.clone());
        prop_assert!(s.worst_triangle().is_none());
        for h in GroupElement::all(2) {
            let perm = g.flip_permutation(&h).unwrap();
            for i in 0..100 {
                for j in 0..100 {
                    prop_assert!((s.get(perm[i], perm[j]) - s.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn self_distortion_is_the_identity(seed in any::<u64>()) {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        let d = graph_metric(&g).unwrap();
        let p = qs_distortion(&d, &d, 2000, seed).unwrap();
        for b in p.forward.iter().chain(&p.inverse) {
            if let Some(r) = b.max_ratio {
                prop_assert!(r >= b.lower - 1e-12 && r < b.upper + 1e-12);
            }
        }
    }
}

#[test]
fn letters_round_trip() {
    for d in 0..10u8 {
        let l = Letter::from_digit(d).unwrap();
        assert_eq!(l.digit(), d);
        assert_eq!(l.flipped().flipped(), l);
    }
}
