use criterion::{criterion_group, criterion_main, Criterion};
use grooming_core::statfit::{
    fit_powerlaw, fit_tradeoff, hierarchy_profile, threshold_fit, HierarchyMode, TradeoffObservation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tradeoff(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let agents: Vec<TradeoffObservation> = (0..1000)
        .map(|_| {
            let m = 1.0 + 4.0 * rng.random::<f64>();
            let u = 20.0 + 180.0 * rng.random::<f64>();
            let noise = 0.1 * (rng.random::<f64>() - 0.5);
            TradeoffObservation {
                ties: (1.3 * u.ln() - 1.2 * m.ln() + noise).exp(),
                mean_strength: m,
                active_days: u,
            }
        })
        .collect();
    c.bench_function("fit_tradeoff_1000", |b| b.iter(|| fit_tradeoff(&agents).unwrap()));
}

fn strengths(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d: Vec<f64> = (0..100_000)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / 1.5))
        .collect();
    c.bench_function("fit_powerlaw_1e5", |b| b.iter(|| fit_powerlaw(&d).unwrap()));
    c.bench_function("hierarchy_profile_1e5", |b| {
        b.iter(|| hierarchy_profile(&d, HierarchyMode::Sim, 11).unwrap())
    });
}

fn threshold(c: &mut Criterion) {
    let points: Vec<(f64, f64)> = (0..620)
        .map(|i| {
            let a = 0.5 + 0.05 * f64::from(i % 31);
            let phi = if a >= 0.8 { 0.9 * a + 1.3 } else { 0.3 * a + 1.55 };
            (a, phi + 0.01 * f64::from(i % 7))
        })
        .collect();
    c.bench_function("threshold_fit_620", |b| b.iter(|| threshold_fit(&points, 0.8).unwrap()));
}

criterion_group!(benches, tradeoff, strengths, threshold);
criterion_main!(benches);
