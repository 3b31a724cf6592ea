use chainskip::bench::{ba_family, ba_graph, ba_model, capacity_search, energy_residual, to_ising, BaParams, LinearMode};
use chainskip::embed::{find_embedding, metrics, EmbedderParams};
use chainskip::hwgraph::HardwareGraph;
use chainskip::ising::brute_force_ground;
use chainskip::sampler::{SaSampler, Sampler};

fn params(n: usize, m: usize, seed: u64) -> BaParams {
    BaParams {
        n,
        m,
        seed,
        linear: LinearMode::Zero,
    }
}

#[test]
fn ba_degree_tail_is_heavy() {
    let mut heavy = 0;
    for seed in 0..20 {
        let g = ba_graph(&params(500, 3, seed)).unwrap();
        let degrees = g.degrees();
        let mean = 2.0 * g.num_edges() as f64 / 500.0;
        let max = *degrees.values().max().unwrap() as f64;
        if max >= 3.0 * mean {
            heavy += 1;
        }
    }
    assert!(heavy >= 18, "{heavy}/20");
}

#[test]
fn couplings_are_standard_normal() {
    let g = ba_graph(&params(200, 3, 4)).unwrap();
    let m = to_ising(&g, 4, LinearMode::Zero).unwrap();
    let j: Vec<f64> = m.quadratic_terms().map(|t| t.2).collect();
    let mean = j.iter().sum::<f64>() / j.len() as f64;
    let var = j.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (j.len() - 1) as f64;
    assert!(mean.abs() <= 0.15, "{mean}");
    assert!((var - 1.0).abs() <= 0.25, "{var}");
}

#[test]
fn sa_residual_never_negative() {
    let sa = SaSampler {
        num_reads: 200,
        sweeps: 200,
        ..Default::default()
    };
    for seed in 0..10 {
        let linear = if seed % 2 == 0 { LinearMode::Zero } else { LinearMode::Normal };
        let m = ba_model(&BaParams { linear, ..params(16, 3, seed) }).unwrap();
        let (_, ground) = brute_force_ground(&m).unwrap();
        let best = sa.sample(&m, seed).unwrap().min_energy().unwrap();
        assert!(best >= ground);
        assert!(energy_residual(best, ground) >= 0.0);
    }
}

#[test]
fn metrics_match_recount() {
    let hw = HardwareGraph::chimera(4, 4, 4).unwrap();
    let m = ba_model(&params(24, 3, 7)).unwrap();
    let e = find_embedding(&m.coupling_graph(), &hw, &EmbedderParams::default().with_seed(7)).unwrap();
    let got = metrics(&e, &hw);
    let lens: Vec<usize> = e.chains.values().map(|c| c.len()).collect();
    let used: usize = lens.iter().sum();
    let avg = used as f64 / lens.len() as f64;
    assert_eq!(got.used_qubits, used);
    assert_eq!(got.unused_qubits, 128 - used);
    assert_eq!(got.max_chain_len, *lens.iter().max().unwrap());
    assert!((got.avg_chain_len - avg).abs() < 1e-12);
    let var = lens.iter().map(|&l| (l as f64 - avg).powi(2)).sum::<f64>() / lens.len() as f64;
    assert!((got.chain_len_variance - var).abs() < 1e-12);
    assert!(got.max_chain_len as f64 >= got.avg_chain_len && got.avg_chain_len >= 1.0);
}

#[test]
fn dominant_chains_near_capacity() {
    let hw = HardwareGraph::chimera(8, 8, 4).unwrap();
    let mut heavy = 0;
    let mut ratios = Vec::new();
    for seed in 0..20 {
        // largest size from 40 downwards that embeds
        let (n, s) = (0..)
            .map(|k| 40 - 3 * k)
            .find_map(|n| {
                let m = ba_model(&params(n, 3, seed)).unwrap();
                find_embedding(&m.coupling_graph(), &hw, &EmbedderParams::default().with_seed(seed))
                    .ok()
                    .map(|e| (n, metrics(&e, &hw)))
            })
            .unwrap();
        ratios.push((n, s.max_chain_len as f64 / s.avg_chain_len));
        if s.max_chain_len as f64 >= 3.0 * s.avg_chain_len {
            heavy += 1;
        }
    }
    assert!(heavy >= 14, "{heavy}/20 {ratios:?}");
}

#[test]
fn cuts_raise_capacity_on_small_chimera() {
    let hw = HardwareGraph::chimera(4, 4, 4).unwrap();
    let mut wins = 0;
    for seed in 0..10 {
        let p = EmbedderParams::default().with_seed(seed);
        let family = ba_family(3, seed, LinearMode::Zero);
        let base = capacity_search(&family, &hw, 0, &p).unwrap();
        let cut = capacity_search(&family, &hw, 5, &p).unwrap();
        assert!(cut.failed_at == cut.capacity + 1 && base.failed_at == base.capacity + 1);
        if cut.capacity >= base.capacity {
            wins += 1;
        }
    }
    assert!(wins >= 8, "{wins}/10");
}
