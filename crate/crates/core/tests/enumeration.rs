use carmichael::catalog::write_catalog;
use carmichael::stats::{count_table, prime_tables, residue_table};
use carmichael::{
    enumerate, merge, oracle_enumerate, Catalog, CheckpointList, CompletionMode, EnumerationConfig,
};

fn text(c: &Catalog<u64>) -> String {
    let mut buf = Vec::new();
    write_catalog(c, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn enumerator_matches_oracle() {
    for limit in [
        561u64, 562, 1_000, 10_000, 65_537, 100_000, 1_000_000, 2_821, 2_822,
    ] {
        let fast = enumerate(&EnumerationConfig::new(limit)).unwrap();
        let slow = oracle_enumerate(limit).unwrap();
        assert_eq!(text(&fast), text(&slow), "limit {limit}");
    }
}

#[test]
fn modes_agree() {
    for limit in [1_000_000u64, 100_000_000, 1_000_000_000, 10_000_000_000] {
        let outputs: Vec<String> = [
            CompletionMode::Basic,
            CompletionMode::LastPrime,
            CompletionMode::LastTwo,
        ]
        .into_iter()
        .map(|m| text(&enumerate(&EnumerationConfig::new(limit).with_mode(m)).unwrap()))
        .collect();
        assert_eq!(outputs[0], outputs[1], "basic vs last-prime at {limit}");
        assert_eq!(outputs[0], outputs[2], "basic vs last-two at {limit}");
    }
}

#[test]
fn worker_counts_agree() {
    let base = text(&enumerate(&EnumerationConfig::new(1_000_000_000u64)).unwrap());
    for w in [4, 16] {
        let other =
            text(&enumerate(&EnumerationConfig::new(1_000_000_000u64).with_workers(w)).unwrap());
        assert_eq!(base, other, "workers {w}");
    }
}

#[test]
fn wide_and_narrow_words_agree() {
    let narrow = enumerate(&EnumerationConfig::new(100_000_000u64)).unwrap();
    let wide = enumerate(&EnumerationConfig::new(100_000_000u128)).unwrap();
    let widened: Vec<u128> = narrow.values().map(u128::from).collect();
    assert_eq!(wide.values().collect::<Vec<_>>(), widened);
}

#[test]
fn per_d_counts() {
    let c = enumerate(&EnumerationConfig::new(100_000_000u64)).unwrap();
    let cps = CheckpointList::default_for(100_000_000u64).unwrap();
    let t = count_table(c.entries(), &cps, Some(100_000_000)).unwrap();
    assert_eq!(t.counts[&1_000_000], 43);
    assert_eq!(t.counts_by_d[&(5, 100_000_000)], 27);
    assert_eq!(t.counts_by_d[&(3, 100_000)], 12);
    assert_eq!(t.counts_by_d[&(4, 100_000)], 4);
    let too_far = CheckpointList::new(vec![1_000_000_000u64]).unwrap();
    assert!(count_table(c.entries(), &too_far, Some(100_000_000)).is_err());
    let only7 = enumerate(&EnumerationConfig::new(1_000_000_000u64).with_factors(7, 7)).unwrap();
    assert!(only7.is_empty());
    let only3 = enumerate(&EnumerationConfig::new(10_000u64).with_factors(3, 3)).unwrap();
    assert_eq!(only3.len(), 7);
}

#[test]
fn residue_and_prime_tables_small() {
    let c = oracle_enumerate(1_000_000).unwrap();
    let cps = CheckpointList::new(vec![1_000_000u64]).unwrap();
    let r = residue_table(c.entries(), 12, &cps).unwrap();
    let total: u64 = (0..12).map(|k| r[&(k, 1_000_000)]).sum();
    assert_eq!(total, 43);
    assert!((0..12).step_by(2).all(|k| r[&(k, 1_000_000)] == 0));
    let (div, least) = prime_tables(c.entries(), &[3, 5], &cps).unwrap();
    assert_eq!(div[&(3, 1_000_000)], least[&(3, 1_000_000)]);
    let r5 = residue_table(c.entries(), 5, &cps).unwrap();
    assert_eq!(div[&(5, 1_000_000)], r5[&(0, 1_000_000)]);
}

#[test]
fn merges() {
    let d3 = enumerate(&EnumerationConfig::new(100_000u64).with_factors(3, 3)).unwrap();
    let d4 = enumerate(&EnumerationConfig::new(100_000u64).with_factors(4, 4)).unwrap();
    let both = merge(&[d3.clone(), d4]).unwrap();
    assert_eq!(both.len(), 16);
    let p = both.provenance().unwrap();
    assert_eq!((p.min_factors, p.max_factors), (3, 4));
    assert_eq!(merge(&[d3.clone(), d3.clone()]).unwrap(), d3);

    let all = oracle_enumerate(1_000_000).unwrap();
    let (lo, hi) = all.entries().split_at(20);
    let halves = [
        Catalog::from_entries(None, lo.to_vec()).unwrap(),
        Catalog::from_entries(None, hi.to_vec()).unwrap(),
    ];
    assert_eq!(merge(&halves).unwrap().len(), 43);
}
