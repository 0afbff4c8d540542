use std::time::Instant;

use semifield_core::gf::{primitive_polys, FieldSpec};
use semifield_core::search::{complete_search, complete_search_parallel, SearchConfig};

#[test]
fn order_81_counts_for_polynomials_1_and_4() {
    let spec = FieldSpec::new(3, 4).unwrap();
    let polys = primitive_polys(spec);
    for (index, want) in [(1, 6811), (4, 7866)] {
        let start = Instant::now();
        let config = SearchConfig::from_poly(&polys[index - 1]).unwrap();
        let count = complete_search(&config).count();
        eprintln!("poly ({index}): {count} in {:?}", start.elapsed());
        assert_eq!(count, want);
    }
}

#[test]
fn shard_union_equals_sequential_stream() {
    let spec = FieldSpec::new(3, 4).unwrap();
    let config = SearchConfig::from_poly(&primitive_polys(spec)[2]).unwrap();
    let seq: Vec<_> = complete_search(&config).collect();
    assert_eq!(complete_search_parallel(&config), seq);
    let mut sharded = Vec::new();
    for key in config.shard_keys().into_iter().rev() {
        let mut part: Vec<_> = complete_search(&config.clone().with_prefix(key)).collect();
        part.append(&mut sharded);
        sharded = part;
    }
    assert_eq!(sharded, seq);
}
