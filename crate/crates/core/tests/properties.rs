use proptest::prelude::*;

use siglap::bounds::{self, EdgeMoments, GraphSpectra};
use siglap::ensembles::{self, ErParams, WeightModel};
use siglap::graph::{self, Graph};
use siglap::linalg::{self, Restriction};
use siglap::spectral::{self, IntMatrix, WeightVector};

fn er_graph(n: usize, p: f64, seed: u64) -> Graph {
    ensembles::gen_er(&ErParams::supercritical(n, p), seed).unwrap()
}

/// Random graph with at least `min_edges` edges: G(n, p) or, for n <= 25,
/// one of the deterministic families.
fn arb_graph(min_edges: usize) -> impl Strategy<Value = Graph> {
    (3usize..=25, 0.15f64..0.9, any::<u64>(), 0usize..5)
        .prop_map(|(n, p, seed, kind)| match kind {
            0 => graph::complete_graph(n).unwrap(),
            1 => graph::cycle_graph(n).unwrap(),
            2 => graph::path_graph(n).unwrap(),
            3 => graph::star_graph(n).unwrap(),
            _ => er_graph(n, p, seed),
        })
        .prop_filter("enough edges", move |g| g.edge_count() >= min_edges)
}

fn weights_for(g: &Graph, raw: &[f64]) -> WeightVector {
    let v = (0..g.edge_count()).map(|i| raw[i % raw.len()] + 0.01 * i as f64).collect();
    WeightVector::new(g, v).unwrap()
}

prop_compose! {
    fn graph_and_weights(min_edges: usize)(g in arb_graph(min_edges), raw in prop::collection::vec(-3.0f64..3.0, 1..40)) -> (Graph, WeightVector) {
        let w = weights_for(&g, &raw);
        (g, w)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, .. ProptestConfig::default() })]

    #[test]
    fn laplacian_rows_sum_to_zero((g, w) in graph_and_weights(1)) {
        let l = spectral::laplacian(&g, &w).unwrap();
        for i in 0..l.dim() {
            let off: f64 = (0..l.dim()).filter(|&j| j != i).map(|j| l.get(i, j)).sum();
            prop_assert_eq!(off + l.get(i, i), 0.0);
        }
        prop_assert!(l.mul_vec(&vec![1.0; l.dim()]).iter().all(|x| x.abs() <= 1e-12 * (1.0 + l.inf_norm())));
    }

    #[test]
    fn laplacian_is_additive_on_dyadic_weights(g in arb_graph(1), a in prop::collection::vec(-64i32..64, 1..30), b in prop::collection::vec(-64i32..64, 1..30)) {
        let e = g.edge_count();
        let wa = WeightVector::new(&g, (0..e).map(|i| a[i % a.len()] as f64 / 8.0).collect()).unwrap();
        let wb = WeightVector::new(&g, (0..e).map(|i| b[i % b.len()] as f64 / 8.0).collect()).unwrap();
        let sum = spectral::laplacian(&g, &(&wa + &wb)).unwrap();
        let parts = &spectral::laplacian(&g, &wa).unwrap() + &spectral::laplacian(&g, &wb).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn incidence_identities(g in arb_graph(1)) {
        let c = spectral::incidence_matrix(&g);
        prop_assert!(c.col_sums().iter().all(|&s| s == 2));
        let degrees: Vec<i64> = g.degrees().iter().map(|&d| d as i64).collect();
        prop_assert_eq!(c.row_sums(), degrees);
        let e = g.edge_count();
        let mut two = IntMatrix::zeros(e, e);
        for k in 0..e {
            two.set(k, k, 2);
        }
        prop_assert_eq!(spectral::line_graph_adjacency_int(&g), &c.transpose().matmul(&c) - &two);
        prop_assert_eq!(spectral::adjacency_matrix(&g), &c.matmul(&c.transpose()) - &spectral::degree_matrix(&g));
    }

    #[test]
    fn hs_identity((g, w) in graph_and_weights(1)) {
        let hs = spectral::hs_quadratic_form(&g, &w).unwrap();
        let fro = spectral::laplacian(&g, &w).unwrap().frobenius_norm().powi(2);
        let dense = spectral::hs_form_matrix(&g).quadratic_form(w.values());
        prop_assert!((hs - fro).abs() <= 1e-10 * hs.max(1.0));
        prop_assert!((hs - dense).abs() <= 1e-10 * hs.max(1.0));
    }

    #[test]
    fn fluctuation_laplacian_has_zero_trace((g, w) in graph_and_weights(1)) {
        let d = spectral::decompose(&w).unwrap();
        let l = spectral::laplacian(&g, &d.fluctuation).unwrap();
        let scale = l.frobenius_norm().max(1.0);
        prop_assert!(l.trace().abs() <= 1e-12 * scale * g.edge_count() as f64);
        let restricted = Restriction::new(&l, &vec![1.0; l.dim()]).unwrap();
        let ev = linalg::symmetric_eigenvalues(&restricted.matrix).unwrap();
        prop_assert!(ev.iter().sum::<f64>().abs() <= 1e-9 * scale);
    }

    #[test]
    fn trace_zero_extreme_bounds_fluctuation_spectrum((g, w) in graph_and_weights(1)) {
        let d = spectral::decompose(&w).unwrap();
        let l = spectral::laplacian(&g, &d.fluctuation).unwrap();
        let restricted = Restriction::new(&l, &vec![1.0; l.dim()]).unwrap();
        let ev = linalg::symmetric_eigenvalues(&restricted.matrix).unwrap();
        let bound = bounds::trace_zero_extreme(g.vertex_count(), l.frobenius_norm());
        for x in ev {
            prop_assert!(x.abs() <= bound * (1.0 + 1e-10) + 1e-12, "{x} exceeds {bound}");
        }
    }

    #[test]
    fn sandwich_holds((g, w) in graph_and_weights(2)) {
        let cert = bounds::theorem_bounds(&g, &w, true).unwrap();
        prop_assert_eq!(cert.sandwich_violations(), 0, "{:?} outside [{}, {}]", cert.oracle, cert.lower, cert.upper);
        if cert.positivity_paper {
            prop_assert!(cert.oracle.as_ref().unwrap()[0] > 0.0);
        }
        if cert.positivity_naive {
            prop_assert!(w.values().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn k3_bounds_are_attained(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = graph::complete_graph(3).unwrap();
        let w = WeightVector::new(&g, vec![a, b, -(a + b)]).unwrap();
        let c = bounds::theorem_bounds(&g, &w, true).unwrap();
        let ev = c.oracle.clone().unwrap();
        let tol = c.tolerance();
        prop_assert!((ev[0] - c.lower).abs() <= tol && (ev[1] - c.upper).abs() <= tol, "{ev:?} vs [{}, {}]", c.lower, c.upper);
    }

    #[test]
    fn interval_widens_with_variance(g in arb_graph(2), q in -2.0f64..2.0, v in 0.0f64..4.0, dv in 0.001f64..4.0) {
        let s = GraphSpectra::compute(&g).unwrap();
        let e = g.edge_count();
        let m1 = EdgeMoments { q, p: v + q * q, variance: v, edge_count: e };
        let m2 = EdgeMoments { q, p: v + dv + q * q, variance: v + dv, edge_count: e };
        prop_assert!(s.radius(&m2) > s.radius(&m1));
    }

    #[test]
    fn edge_list_round_trip((g, w) in graph_and_weights(1)) {
        let text = graph::write_edge_list(&g, Some(&w));
        let (g2, w2) = graph::read_edge_list(&text).unwrap();
        prop_assert_eq!(&g2, &g);
        prop_assert_eq!(w2.unwrap(), w);
        let (g3, w3) = graph::read_edge_list(&graph::write_edge_list(&g, None)).unwrap();
        prop_assert_eq!(g3, g);
        prop_assert!(w3.is_none());
    }

    #[test]
    fn generators_are_deterministic(n in 5usize..60, seed in any::<u64>()) {
        let p = ErParams::supercritical(n, 0.3);
        prop_assert_eq!(ensembles::gen_er(&p, seed).unwrap(), ensembles::gen_er(&p, seed).unwrap());
        let n = n + n % 2;
        prop_assert_eq!(ensembles::gen_regular(n, 3, seed).unwrap(), ensembles::gen_regular(n, 3, seed).unwrap());
        let m = WeightModel::StudentT { mean: 1.0, scale: 1.0, dof: 3.0 };
        prop_assert_eq!(ensembles::gen_weights(n, &m, seed).unwrap(), ensembles::gen_weights(n, &m, seed).unwrap());
    }

    #[test]
    fn regular_samples_are_simple_and_regular(half in 3usize..40, d in 3usize..6, seed in any::<u64>()) {
        let n = 2 * half;
        prop_assume!(d < n);
        let g = ensembles::gen_regular(n, d, seed).unwrap();
        prop_assert_eq!(g.classify().regular_degree, Some(d));
        prop_assert_eq!(g.edge_count(), n * d / 2);
    }
}
