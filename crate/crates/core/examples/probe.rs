use streamkv_core::harness::replay;
use streamkv_core::streaming::StreamConfig;
use streamkv_core::trace::{generate_trace, TrajectoryConfig, TrajectoryKind};

fn main() {
    let tcfg = TrajectoryConfig {
        kind: TrajectoryKind::RoomRevisit,
        frames: 2000,
        noise_sigma: 0.02,
        seed: 21,
        heads: 2,
        head_dim: 16,
        layers: 2,
        payload_bytes: 64,
        ..TrajectoryConfig::default()
    };
    let trace = generate_trace(&tcfg).unwrap();
    let cfg = StreamConfig { layers: 2, ..StreamConfig::default() };
    let with = replay(&trace, &cfg).unwrap();
    let mut un = cfg.clone();
    un.memory.compress_interval = 1_000_000;
    let without = replay(&trace, &un).unwrap();
    println!(
        "compressed: peak_live={} final_live={} events={} tombstoned={} peak_bytes={}",
        with.metrics.summary.peak_live,
        with.metrics.summary.final_live,
        with.metrics.summary.compression_events,
        with.metrics.summary.tombstoned_total,
        with.metrics.summary.peak_payload_bytes,
    );
    println!(
        "uncompressed: peak_live={} peak_bytes={}",
        without.metrics.summary.peak_live, without.metrics.summary.peak_payload_bytes,
    );
    println!("deltas: {:?}", with.metrics.summary.compression_deltas.iter().map(|d| (d.trigger_frame, d.live_before, d.live_after)).collect::<Vec<_>>());
    println!("recall seg={:.3} topk(recall)", with.metrics.summary.mean_recall);
    // engine vs metrics cross-check
    assert_eq!(with.report.peak_live, with.metrics.summary.peak_live);
    assert_eq!(with.report.final_stats.peak_payload_bytes, with.metrics.summary.peak_payload_bytes);
    println!("engine/metrics peaks agree");
}
