use criterion::{criterion_group, criterion_main, Criterion};

use tropline::catalog::{search_all, Catalog};
use tropline::count::{count_lines, CountOptions};
use tropline::subdivision::subdivide;
use tropline::surface::build_surface;
use tropline::survey::{survey, SurveyConfig};
use tropline_bench::perturbed_alpha;

fn pipeline(c: &mut Criterion) {
    let cat = Catalog::builtin();
    for delta in [3, 4] {
        let l = perturbed_alpha(delta, 1);
        c.bench_function(&format!("subdivide/{delta}"), |b| b.iter(|| subdivide(&l)));
        let x = build_surface(&l).unwrap();
        c.bench_function(&format!("search_all/{delta}"), |b| {
            b.iter(|| search_all(&cat, x.triangulation()))
        });
        c.bench_function(&format!("count_lines/{delta}"), |b| {
            b.iter(|| count_lines(&cat, &x, &CountOptions::default()).unwrap())
        });
    }
    let mut g = c.benchmark_group("survey");
    g.sample_size(10);
    g.bench_function("cubic/20", |b| {
        b.iter(|| survey(&cat, &SurveyConfig::new(3, 1, 20)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
