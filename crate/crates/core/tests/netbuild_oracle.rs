mod common;

use common::*;
use netclass::dataset::{load_csv, ColumnRef, LoadOptions};
use netclass::measures::connected_components;
use netclass::netbuild::{build_attribute_graph, ConstructionConfig, Method, Network};
use proptest::prelude::*;
use rand::Rng;

fn build(d: &netclass::dataset::Dataset, method: Method, k: usize) -> netclass::Result<EdgeSet> {
    Network::build(d, &ConstructionConfig::new(method, k)).map(|n| edge_set(&n.graph))
}

#[test]
fn constructions_match_brute_force() {
    let mut r = rng(7);
    for _ in 0..200 {
        let d = random_dataset(&mut r, 30, 4, 3);
        let k = r.gen_range(1..=3);
        assert_eq!(
            build(&d, Method::KnnOnly, k).unwrap(),
            knn_edges(&d, k, &|i, j| euclid(&d, i, j))
        );
        match hybrid_edges(&d, k) {
            Some(es) => {
                assert_eq!(build(&d, Method::KnnEpsilonRadius, k).unwrap(), es);
                assert_eq!(
                    build(&d, Method::AttributeMeta, k).unwrap(),
                    meta_edges(&d, k).unwrap()
                );
            }
            None => {
                assert!(build(&d, Method::KnnEpsilonRadius, k).is_err());
                assert!(build(&d, Method::AttributeMeta, k).is_err());
            }
        }
    }
}

#[test]
fn wine_meta_is_better_connected() {
    let d = load_csv(
        data_path("wine.csv"),
        &LoadOptions::new(ColumnRef::Index(0)),
    )
    .unwrap();
    let count = |m| {
        connected_components(
            &Network::build(&d, &ConstructionConfig::new(m, 1))
                .unwrap()
                .graph,
        )
        .count
    };
    let (meta, base) = (
        count(Method::AttributeMeta),
        count(Method::KnnEpsilonRadius),
    );
    assert!(meta < base, "meta {meta} vs baseline {base}");
}

fn dataset() -> impl Strategy<Value = netclass::dataset::Dataset> {
    any::<u64>().prop_map(|seed| random_dataset(&mut rng(seed), 25, 4, 3))
}

proptest! {
    #[test]
    fn label_purity(d in dataset(), k in 1usize..4) {
        for method in [Method::KnnOnly, Method::KnnEpsilonRadius, Method::AttributeMeta] {
            if let Ok(es) = build(&d, method, k) {
                for (u, v) in es {
                    prop_assert_eq!(d.label(u), d.label(v));
                }
            }
        }
    }

    #[test]
    fn radius_rule_extends_knn(d in dataset(), k in 1usize..4) {
        if let Ok(hybrid) = build(&d, Method::KnnEpsilonRadius, k) {
            let knn = build(&d, Method::KnnOnly, k).unwrap();
            prop_assert!(knn.is_subset(&hybrid));
            let meta = build(&d, Method::AttributeMeta, k).unwrap();
            prop_assert!(hybrid.is_subset(&meta));
            let comps = |es: &EdgeSet| component_count(d.n_instances(), es);
            prop_assert!(comps(&meta) <= comps(&hybrid));
        }
    }

    #[test]
    fn attribute_graphs_ignore_affine_rescaling(d in dataset(), a_exp in -3i32..4, shift in -20i32..20) {
        let cfg = ConstructionConfig::new(Method::AttributeMeta, 2);
        // power-of-two scales and integer shifts keep grid values exact
        let scale = 2f64.powi(a_exp);
        for a in 0..d.n_attributes() {
            let moved = d.map_column(a, |x| scale * x + f64::from(shift));
            prop_assert_eq!(
                build_attribute_graph(&d, a, &cfg).unwrap(),
                build_attribute_graph(&moved, a, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn construction_is_deterministic(d in dataset(), k in 1usize..4) {
        for method in [Method::KnnOnly, Method::KnnEpsilonRadius, Method::AttributeMeta] {
            let cfg = ConstructionConfig::new(method, k);
            let a = Network::build(&d, &cfg).map(|n| n.graph);
            let b = Network::build(&d, &cfg).map(|n| n.graph);
            prop_assert_eq!(a.ok(), b.ok());
        }
    }
}
