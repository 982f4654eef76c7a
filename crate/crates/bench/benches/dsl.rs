use criterion::{black_box, criterion_group, criterion_main, Criterion};
use twopath::{parse, serialize};
use twopath_bench::DOCUMENT;

fn parsing(c: &mut Criterion) {
    c.bench_function("parse_document", |b| b.iter(|| parse(black_box(DOCUMENT)).unwrap()));
    let doc = parse(DOCUMENT).unwrap();
    c.bench_function("serialize_document", |b| b.iter(|| serialize(black_box(&doc))));
    let broken = DOCUMENT.replace("length=2.0", "length=-2.0").replace("k = 200.0", "k = @");
    c.bench_function("parse_with_diagnostics", |b| {
        b.iter(|| parse(black_box(&broken)).unwrap_err())
    });
}

criterion_group!(benches, parsing);
criterion_main!(benches);
