//! Benchmarks the verification campaign engine sequentially and with the
//! data-parallel scheduler, over a representative slice of properties.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use opmeans_verify::{run_campaign, CampaignConfig};

fn campaign_config(parallelism: usize) -> CampaignConfig {
    CampaignConfig {
        props: vec![
            "thm-2.7-logsup".into(),
            "thm-3.1-i".into(),
            "cor-3.6".into(),
            "thm-4.7".into(),
            "cor-6.4".into(),
            "thm-6.5".into(),
            "prop-revholder".into(),
            "cor-6.9".into(),
        ],
        dim: None,
        trials: 12,
        seed: 7,
        tol: 1e-8,
        parallelism,
    }
}

fn bench_campaign(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for parallelism in [1usize, 4] {
        group.bench_with_input(
            BenchmarkId::new("parallelism", parallelism),
            &parallelism,
            |b, &p| {
                let cfg = campaign_config(p);
                b.iter(|| run_campaign(&cfg).expect("campaign runs"));
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_campaign);
criterion_main!(benches);
