// Temporary pilot harness; run with --ignored to size thresholds.

use coroica::covstats::{MatrixSet, Provenance};
use coroica::jointdiag::{uwedge, DiagonalizerOptions};
use coroica::metrics::{mcis, md_index};
use coroica::rng::{normal, substream};
use coroica::separation::{choiica_fit, coroica_fit, random_unmixing, SeparationConfig};
use coroica::simgen::{gen_blockvar, gen_garch, BlockVarSpec, GarchSetting, GarchSpec, NoiseKind};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::time::Instant;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
#[ignore]
fn pilot_uwedge_exact() {
    let d = 10;
    for seed in 0..20u64 {
        let mut rng = substream(1000 + seed, 0);
        let a = DMatrix::from_fn(d, d, |_, _| normal(&mut rng));
        let mats: Vec<DMatrix<f64>> = (0..30)
            .map(|_| {
                let diag = DVector::from_fn(d, |_, _| rng.random_range(0.0..1.0));
                let m = &a * DMatrix::from_diagonal(&diag) * a.transpose();
                (&m + m.transpose()) * 0.5
            })
            .collect();
        let prov = (0..30).map(|k| Provenance::Block { block: k, lag: 0 }).collect();
        let set = MatrixSet::new(mats, prov).unwrap();
        let start = Instant::now();
        let res = uwedge(&set, &DiagonalizerOptions::default()).unwrap();
        let elapsed = start.elapsed();
        let md = md_index(&res.v, &a).unwrap().value;
        println!(
            "seed {seed}: md {md:.2e} iters {} converged {} loss {:.2e} in {:?}",
            res.iterations, res.converged, res.final_loss, elapsed
        );
        assert!(md < 1e-6);
    }
}

#[test]
#[ignore]
fn pilot_ds1_robustness() {
    // criterion-3 scale: n=2e4, d=8, m=10, c2=1
    for c1 in [0.5, 1.0, 2.0] {
        let start = Instant::now();
        let mut md_coro = Vec::new();
        let mut md_choi = Vec::new();
        let mut iters = Vec::new();
        for seed in 0..50u64 {
            let spec = BlockVarSpec::new(20_000, 8, 10, c1, 1.0, 9000 + seed);
            let inst = gen_blockvar(&spec).unwrap();
            let cfg = SeparationConfig::var(vec![200]);
            let m1 = coroica_fit(&inst.x, &inst.group_labels, &cfg).unwrap();
            md_coro.push(md_index(m1.unmixing(), &inst.mixing).unwrap().value);
            iters.push(m1.iterations as f64);
            let m2 = choiica_fit(&inst.x, &cfg).unwrap();
            md_choi.push(md_index(m2.unmixing(), &inst.mixing).unwrap().value);
        }
        println!(
            "c1={c1}: coro median {:.3} choi median {:.3} gap {:.3} median iters {} in {:?}",
            median(md_coro.clone()),
            median(md_choi.clone()),
            median(md_choi) - median(md_coro.clone()),
            median(iters),
            start.elapsed()
        );
    }
}

#[test]
#[ignore]
fn pilot_ds1_no_confounding() {
    for c2 in [0.4, 1.6] {
        let mut md_coro = Vec::new();
        let mut md_choi = Vec::new();
        for seed in 0..50u64 {
            let spec = BlockVarSpec::new(20_000, 8, 10, 0.0, c2, 11_000 + seed);
            let inst = gen_blockvar(&spec).unwrap();
            let cfg = SeparationConfig::var(vec![200]);
            let m1 = coroica_fit(&inst.x, &inst.group_labels, &cfg).unwrap();
            md_coro.push(md_index(m1.unmixing(), &inst.mixing).unwrap().value);
            let m2 = choiica_fit(&inst.x, &cfg).unwrap();
            md_choi.push(md_index(m2.unmixing(), &inst.mixing).unwrap().value);
        }
        println!(
            "c2={c2}: coro median {:.3} choi median {:.3} diff {:.3}",
            median(md_coro.clone()),
            median(md_choi.clone()),
            median(md_coro) - median(md_choi)
        );
    }
}

#[test]
#[ignore]
fn pilot_garch() {
    let start_all = Instant::now();
    for setting in [GarchSetting::One, GarchSetting::Two, GarchSetting::Three] {
        for noise in [NoiseKind::Ar, NoiseKind::Iid] {
            let start = Instant::now();
            let mut md_coro = Vec::new();
            let mut md_choi = Vec::new();
            for seed in 0..20u64 {
                let spec = GarchSpec { n: 100_000, d: 6, ..GarchSpec::new(setting, noise, 13_000 + seed) };
                let inst = gen_garch(&spec).unwrap();
                let cfg = SeparationConfig::var_and_td(vec![1, 2, 3], vec![1_000]);
                let m1 = coroica_fit(&inst.x, &inst.group_labels, &cfg).unwrap();
                md_coro.push(md_index(m1.unmixing(), &inst.mixing).unwrap().value);
                let cfg_var = SeparationConfig::var(vec![1_000]);
                let m2 = choiica_fit(&inst.x, &cfg_var).unwrap();
                md_choi.push(md_index(m2.unmixing(), &inst.mixing).unwrap().value);
            }
            println!(
                "setting {:?} noise {:?}: coro(var&td) median {:.3} choi(var) median {:.3} in {:?}",
                setting,
                noise,
                median(md_coro),
                median(md_choi),
                start.elapsed()
            );
        }
    }
    println!("total {:?}", start_all.elapsed());
}

#[test]
#[ignore]
fn pilot_mcis() {
    let mut wins = 0;
    for seed in 0..20u64 {
        let spec = BlockVarSpec::new(20_000, 8, 10, 1.0, 1.0, 15_000 + seed);
        let inst = gen_blockvar(&spec).unwrap();
        let gp = inst.partition.as_ref().unwrap();
        let truth = inst.mixing.clone().try_inverse().unwrap();
        let score = |v: &DMatrix<f64>| -> f64 {
            let s_hat = coroica::SignalMatrix::new(v * inst.x.values()).unwrap();
            let mut acc = 0.0;
            for partition in gp.partitions() {
                acc += mcis(&s_hat, partition).unwrap();
            }
            acc / gp.partitions().len() as f64
        };
        let true_score = score(&truth);
        let mut beaten = 0;
        for rseed in 0..100u64 {
            let v = random_unmixing(8, 16_000 + seed * 1000 + rseed).unwrap();
            if true_score < score(v.unmixing()) {
                beaten += 1;
            }
        }
        if beaten >= 95 {
            wins += 1;
        }
        println!("instance {seed}: true {true_score:.4} beats {beaten}/100");
    }
    println!("wins: {wins}/20");
}

#[test]
#[ignore]
fn pilot_trend() {
    for n in [10_000usize, 30_000, 100_000] {
        let mut mds = Vec::new();
        for seed in 0..30u64 {
            let spec = BlockVarSpec::new(n, 8, 10, 1.0, 1.0, 17_000 + seed);
            let inst = gen_blockvar(&spec).unwrap();
            let cfg = SeparationConfig::var(vec![n / 100]);
            let m = coroica_fit(&inst.x, &inst.group_labels, &cfg).unwrap();
            mds.push(md_index(m.unmixing(), &inst.mixing).unwrap().value);
        }
        println!("n={n}: median {:.4}", median(mds));
    }
}
