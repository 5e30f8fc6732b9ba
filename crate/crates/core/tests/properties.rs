use papangelou::configuration::{Configuration, GroundSpace, Point};
use papangelou::estimator::Law;
use papangelou::fixtures::{process_function, random_kernel, state_function};
use papangelou::linalg::Matrix;
use papangelou::models::{Activity, Model, PairPotential};
use papangelou::moments::{partition_product, Evaluator, ProcessFunction};
use papangelou::partitions::{enumerate_partitions, partition_count, partition_fibers, project_partition};
use papangelou::transform::{push_forward, Shift};
use proptest::prelude::*;

fn gibbs_model(m: usize, z: &[f64], pairs: &[f64]) -> Model<f64> {
    let mut rows = vec![vec![0.0; m]; m];
    let mut k = 0;
    for i in 0..m {
        for j in i + 1..m {
            // a negative draw stands for a hard-core pair
            let phi = if pairs[k] < 0.0 { f64::INFINITY } else { pairs[k] };
            rows[i][j] = phi;
            rows[j][i] = phi;
            k += 1;
        }
    }
    let ground = GroundSpace::sites(m).unwrap();
    Model::gibbs(
        ground,
        Activity::PerSite(z[..m].to_vec()),
        PairPotential::Table(Matrix::from_rows(rows).unwrap()),
    )
    .unwrap()
}

fn random_gibbs() -> impl Strategy<Value = Model<f64>> {
    (
        1usize..=4,
        prop::collection::vec(0.05f64..3.0, 4),
        prop::collection::vec(-0.5f64..2.0, 6),
    )
        .prop_map(|(m, z, pairs)| gibbs_model(m, &z, &pairs))
}

fn site_permutation(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_counts(n in 1usize..=8, k in 1usize..=8) {
        prop_assert_eq!(enumerate_partitions(n, None).unwrap().len() as u64, partition_count(n, None).unwrap());
        if k <= n {
            prop_assert_eq!(enumerate_partitions(n, Some(k)).unwrap().len() as u64, partition_count(n, Some(k)).unwrap());
        }
    }

    #[test]
    fn fibers_project_back(n in 1usize..=6, pick in any::<prop::sample::Index>()) {
        let all = enumerate_partitions(n, None).unwrap();
        let p = pick.get(&all);
        let fibers = partition_fibers(p);
        prop_assert_eq!(fibers.len(), p.block_count() + 1);
        for q in &fibers {
            prop_assert_eq!(&project_partition(q).unwrap(), p);
        }
    }

    #[test]
    fn configuration_ops_follow_set_algebra(a in 0u32..256, b in 0u32..256) {
        let (x, y) = (Configuration::<f64>::from_mask(a), Configuration::<f64>::from_mask(b));
        prop_assert_eq!(x.union(&y).site_mask(), Some(a | b));
        prop_assert_eq!(x.difference(&y).site_mask(), Some(a & !b));
        prop_assert_eq!(x.is_disjoint(&y), a & b == 0);
        prop_assert_eq!(x.len(), a.count_ones() as usize);
        for s in 0..8 {
            let p = Point::Site(s);
            prop_assert!(!x.without(&p).contains(&p));
            prop_assert_eq!(x.with(p.clone()).site_mask(), Some(a | (1 << s)));
        }
    }

    #[test]
    fn site_lines_round_trip(a in 0u32..1024) {
        let g = GroundSpace::<f64>::sites(10).unwrap();
        let xi = Configuration::from_mask(a);
        prop_assert_eq!(Configuration::parse_line(&xi.to_line(), &g).unwrap(), xi);
    }

    #[test]
    fn window_lines_round_trip(coords in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 0..8)) {
        let g = GroundSpace::window(vec![(0.0, 1.0), (0.0, 1.0)], 1.0).unwrap();
        let xi = Configuration::new(coords.iter().map(|&(s, t)| Point::at(&[s, t])).collect()).unwrap();
        prop_assert_eq!(Configuration::parse_line(&xi.to_line(), &g).unwrap(), xi);
    }

    #[test]
    fn constant_partition_products(n in 1usize..=5, c in -2.0f64..2.0, pick in any::<prop::sample::Index>()) {
        let all = enumerate_partitions(n, None).unwrap();
        let p = pick.get(&all);
        let us: Vec<ProcessFunction<f64>> = (0..n).map(|_| ProcessFunction::constant(c)).collect();
        let xs: Vec<Point<f64>> = (0..p.block_count()).map(Point::Site).collect();
        let got = partition_product(&us, p, &xs, &Configuration::empty());
        prop_assert!((got - c.powi(n as i32)).abs() <= 1e-12 * (1.0 + got.abs()));
    }

    #[test]
    fn gnz_holds_on_random_gibbs_laws(model in random_gibbs()) {
        let d = model.exact_distribution().unwrap();
        let ev = Evaluator::new(&model, Law::Exact(&d));
        for name in ["position", "cardinality", "affine", "exvisible"] {
            let u = process_function(name, model.ground()).unwrap();
            let r = ev.check_gnz(&u);
            prop_assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn nonnegative_inputs_give_nonnegative_terms(model in random_gibbs(), n in 1usize..=3) {
        let d = model.exact_distribution().unwrap();
        let ev = Evaluator::new(&model, Law::Exact(&d));
        let u = process_function("affine", model.ground()).unwrap();
        let f = state_function("cardinality").unwrap();
        let r = ev.check_moment_power(&f, &u, n).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert!(r.terms.iter().all(|t| t.value >= 0.0), "{:?}", r.terms);
    }

    #[test]
    fn random_determinantal_laws(seed in 0u64..1000) {
        let k = random_kernel::<f64>(seed);
        let model = Model::determinantal(GroundSpace::sites(k.dim()).unwrap(), k).unwrap();
        let d = model.exact_distribution().unwrap();
        let total: f64 = d.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(d.probabilities().iter().all(|&p| p >= 0.0));
        let u = process_function("position", model.ground()).unwrap();
        let r = Evaluator::new(&model, Law::Exact(&d)).check_gnz(&u);
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn permutations_preserve_cardinality(perm in site_permutation(6), a in 0u32..64) {
        let g = GroundSpace::<f64>::sites(6).unwrap();
        let tau = Shift::Permutation(perm);
        tau.validate(&g).unwrap();
        let xi = Configuration::from_mask(a);
        let image = push_forward(&tau, &g, &xi).unwrap();
        prop_assert_eq!(image.len(), xi.len());
        for x in xi.iter() {
            let y = tau.apply(&g, x, &xi).unwrap();
            prop_assert_eq!(&tau.inverse(&g, &y, &xi).unwrap(), x);
        }
    }
}

#[test]
fn single_precision_aliases_agree() {
    let ground = papangelou::GroundSpace32::sites(3).unwrap();
    let model: papangelou::Model32 = Model::poisson(ground, Activity::Constant(0.5f32)).unwrap();
    let d: papangelou::ExactDistribution32 = model.exact_distribution().unwrap();
    let ev: papangelou::Evaluator32 = Evaluator::new(&model, Law::Exact(&d)).with_tolerance(1e-5);
    let u: papangelou::ProcessFunction32 = process_function("affine", model.ground()).unwrap();
    let r: papangelou::IdentityReport32 = ev.check_gnz(&u);
    assert!(r.pass, "{r:?}");
    let f: papangelou::StateFunction32 = state_function("one").unwrap();
    assert!(ev.check_moment_power(&f, &u, 3).unwrap().pass);
    // P(x in ξ) = z/(1+z) for each site
    let rho = d.correlation(0b001);
    assert!((rho - 1.0 / 3.0).abs() < 1e-6);
}
