use std::hint::black_box;

use cityforge::compositor::{compose, LayerStack};
use cityforge::hdmap::{HdMap, HdMapConfig};
use cityforge::layout::procedural::sample_city;
use cityforge::layout::SemanticClass;
use cityforge::render::RenderBuffers;
use cityforge::traffic::{simulate, SimConfig};
use cityforge::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn random_layer(rng: &mut ChaCha8Rng, w: usize, h: usize, id: u32) -> RenderBuffers {
    let mut b = RenderBuffers::empty(w, h, [0.0; 3]);
    for i in 0..w * h {
        if rng.random_bool(0.3) {
            b.alpha[i] = 0.9;
            b.transmittance[i] = 0.1;
            b.depth[i] = rng.random_range(1.0..500.0);
            b.color[i] = [rng.random(), rng.random(), rng.random()];
            b.semantic[i] = SemanticClass::BuildingFacade;
            b.instance[i] = id;
        }
    }
    b
}

fn stages(c: &mut Criterion) {
    let layout = sample_city(0);
    let mut group = c.benchmark_group("hdmap_from_layout");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(HdMap::from_layout(&layout, &HdMapConfig::default(), exec)))
        });
    }
    group.finish();

    let map = HdMap::from_layout(&layout, &HdMapConfig::default(), Exec::Parallel);
    let graph = map.lane_graph();
    let cfg = SimConfig {
        n_vehicles: 20,
        n_frames: 100,
        seed: 7,
        ..SimConfig::default()
    };
    c.bench_function("simulate_20x100", |b| b.iter(|| black_box(simulate(&graph, map.pixel_scale, &cfg).unwrap())));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (w, h) = (960, 540);
    let mut stack = LayerStack::new(random_layer(&mut rng, w, h, 0));
    stack.buildings = (1..=10).map(|id| random_layer(&mut rng, w, h, id)).collect();
    stack.vehicles = (0..5).map(|id| random_layer(&mut rng, w, h, 0x8000 + id)).collect();
    let mut group = c.benchmark_group("compose_960x540_16_layers");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(compose(&stack, [0.5; 3], exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
