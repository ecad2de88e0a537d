mod common;

use common::*;
use proptest::prelude::*;
use splz::archive::{build_archive_bytes, ArchiveReader};
use splz::codec::wire::{self, Head};
use splz::codec::{compress_spt, decode_stream, decompress_spt, encode_stream, Token, TokenStream};
use splz::graph::{normalize, to_global, to_local, RawGraph, VertexId, MAX_IN_DEGREE};
use splz::partition::{plan_regions, LenToDic};
use splz::query::query_spt;
use splz::sssp::{dijkstra_spt, distances};

fn nibbles(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..16, len)
}

/// A related pair: `b` is `a` with a few runs overwritten.
fn spt_pair() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (nibbles(1..400), prop::collection::vec((any::<prop::sample::Index>(), 1usize..20, 0u8..16), 0..8)).prop_map(
        |(a, edits)| {
            let mut b = a.clone();
            for (at, len, v) in edits {
                let start = at.index(b.len());
                for x in b.iter_mut().skip(start).take(len) {
                    *x = v;
                }
            }
            (a, b)
        },
    )
}

fn raw_graph(max_n: usize, zero_weights: bool) -> impl Strategy<Value = RawGraph> {
    (1..max_n).prop_flat_map(move |n| {
        let lo = if zero_weights { 0 } else { 1 };
        (
            Just(n),
            prop::collection::vec((0..n as VertexId, 0..n as VertexId, lo..20u32), 0..n * 5),
            prop::collection::vec((-1000i64..1000, -1000i64..1000), n),
        )
            .prop_map(|(n, edges, coords)| RawGraph {
                vertex_count: n,
                edges,
                coords: Some(coords),
            })
    })
}

/// Raw graph with a hub whose in-degree exceeds the nibble limit.
fn hub_graph() -> impl Strategy<Value = RawGraph> {
    (17usize..60, 0usize..40).prop_flat_map(|(spokes, extra)| {
        let n = spokes + 1;
        (
            prop::collection::vec(1u32..10, spokes),
            prop::collection::vec((0..n as VertexId, 0..n as VertexId, 1u32..10), extra),
        )
            .prop_map(move |(ws, extra)| {
                let mut g = RawGraph::new(n);
                for (i, w) in ws.into_iter().enumerate() {
                    g.add_undirected(0, i as VertexId + 1, w);
                }
                g.edges.extend(extra);
                g.coords = Some((0..n as i64).map(|i| (i, i * i % 17)).collect());
                g
            })
    })
}

fn brute_longest(data: &[u8], dict: &[u8]) -> usize {
    (0..dict.len())
        .map(|p| dict[p..].iter().zip(data).take_while(|(a, b)| a == b).count())
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn codec_round_trips((dict, spt) in spt_pair()) {
        let stream = compress_spt(&spt, &dict).unwrap();
        prop_assert_eq!(stream.expanded_length, spt.len());
        prop_assert_eq!(decompress_spt(&stream, &dict).unwrap(), spt.clone());
        let bytes = encode_stream(&stream).unwrap();
        prop_assert_eq!(decode_stream(&bytes).unwrap(), stream);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn greedy_parse_takes_longest_smallest_match((dict, spt) in spt_pair()) {
        let stream = compress_spt(&spt, &dict).unwrap();
        let mut i = 0;
        for tok in &stream.tokens {
            let best = brute_longest(&spt[i..], &dict);
            match *tok {
                Token::Match { location, length } => {
                    prop_assert_eq!(length as usize, best);
                    let first = (0..dict.len())
                        .find(|&p| dict[p..].starts_with(&spt[i..i + best]))
                        .unwrap();
                    prop_assert_eq!(location as usize, first);
                }
                Token::Literal(v) => {
                    prop_assert_eq!(best, 0);
                    prop_assert_eq!(v, spt[i]);
                }
            }
            i += tok.expanded_len();
        }
    }

    #[test]
    fn arbitrary_token_streams_round_trip(
        toks in prop::collection::vec(
            prop_oneof![
                (0u32..0x100_0000, 1u32..=wire::MAX_LENGTH).prop_map(|(location, length)| Token::Match { location, length }),
                (0u8..16).prop_map(Token::Literal),
            ],
            0..50,
        )
    ) {
        let stream = TokenStream::new(toks);
        let bytes = encode_stream(&stream).unwrap();
        prop_assert_eq!(decode_stream(&bytes).unwrap(), stream);
    }

    #[test]
    fn length_and_delta_codes_are_canonical(len in 1u32..=wire::MAX_LENGTH, delta in -wire::MAX_DELTA..=wire::MAX_DELTA) {
        let mut out = Vec::new();
        wire::encode_length(len, &mut out).unwrap();
        let len_bytes = out.len();
        wire::encode_delta(delta, &mut out).unwrap();
        let mut pos = 0;
        prop_assert_eq!(wire::decode_head(&out, &mut pos).unwrap(), Head::Length(len));
        prop_assert_eq!(pos, len_bytes);
        prop_assert_eq!(wire::decode_delta(&out, &mut pos).unwrap(), delta);
        prop_assert_eq!(pos, out.len());
        // any shorter prefix is rejected
        for cut in 0..out.len() {
            let mut p = 0;
            let ok = wire::decode_head(&out[..cut], &mut p).and_then(|_| wire::decode_delta(&out[..cut], &mut p));
            prop_assert!(ok.is_err());
        }
    }

    #[test]
    fn normalized_graph_obeys_degree_limit_and_distances(raw in prop_oneof![raw_graph(40, true), hub_graph()]) {
        let g = normalize(&raw);
        prop_assert_eq!(g.original_vertex_count(), raw.vertex_count);
        for v in 0..g.vertex_count() as VertexId {
            let ins = g.in_edges(v);
            prop_assert!(ins.len() <= MAX_IN_DEGREE);
            prop_assert!(ins.windows(2).all(|w| w[0].tail < w[1].tail));
        }
        for s in 0..raw.vertex_count.min(6) as VertexId {
            let want = bellman_ford_raw(&raw, s);
            let got = distances(&g, s);
            prop_assert_eq!(&got[..raw.vertex_count], &want[..]);
        }
    }

    #[test]
    fn dijkstra_matches_brute_force(raw in raw_graph(40, false)) {
        let g = normalize(&raw);
        prop_assume!(g.virtual_count() == 0);
        for s in 0..g.vertex_count() as VertexId {
            prop_assert_eq!(dijkstra_spt(&g, s), brute_force_spt(&g, s));
        }
    }

    #[test]
    fn dijkstra_tree_is_valid_with_zero_weights_and_splits(raw in prop_oneof![raw_graph(30, true), hub_graph()]) {
        let g = normalize(&raw);
        for s in 0..g.vertex_count().min(10) as VertexId {
            assert_valid_spt(&g, &dijkstra_spt(&g, s));
        }
    }

    #[test]
    fn local_global_round_trip(raw in prop_oneof![raw_graph(30, false), hub_graph()]) {
        let g = normalize(&raw);
        for s in 0..raw.vertex_count.min(8) as VertexId {
            let spt = dijkstra_spt(&g, s);
            let reach = g.reachable_from(s);
            let pred: Vec<Option<VertexId>> = (0..g.vertex_count() as VertexId)
                .map(|v| if reach[v as usize] { spt.parent(&g, v) } else { None })
                .collect();
            prop_assert_eq!(to_local(&pred, &g, s).unwrap(), spt.clone());
            let global = to_global(&spt, &g);
            let dist = bellman_ford_raw(&raw, s);
            for (v, p) in global.iter().enumerate() {
                if let Some(p) = p {
                    let w = raw.edges.iter().filter(|e| e.0 == *p && e.1 == v as VertexId).map(|e| e.2 as u64).min();
                    prop_assert_eq!(dist[*p as usize].zip(w).map(|(a, b)| a + b), dist[v]);
                } else {
                    prop_assert!(v as VertexId == s || dist[v].is_none());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn archive_queries_equal_dijkstra(
        raw in prop_oneof![raw_graph(60, true), hub_graph()],
        c in prop_oneof![Just(0.3), Just(1.0), Just(3.0)],
        d in prop_oneof![Just(LenToDic::INFINITE), (1u32..5).prop_map(|d| LenToDic::finite(d).unwrap())],
        seed in 0u64..1000,
    ) {
        let g = normalize(&raw);
        let plan = plan_regions(&g, c, d, seed, 1).unwrap();
        plan.check(&g).unwrap();
        let (bytes, report) = build_archive_bytes(&g, &plan, 1).unwrap();
        prop_assert_eq!(report.sizes.total(), bytes.len() as u64);
        let (again, _) = build_archive_bytes(&g, &plan, 1).unwrap();
        prop_assert_eq!(&again, &bytes);
        let reader = ArchiveReader::from_bytes(bytes).unwrap();
        for v in 0..g.vertex_count() as VertexId {
            prop_assert_eq!(query_spt(&reader, v).unwrap(), dijkstra_spt(&g, v));
        }
    }

    #[test]
    fn plan_chains_stay_in_region(raw in raw_graph(80, false), d in 1u32..6, seed in 0u64..100) {
        let g = normalize(&raw);
        let plan = plan_regions(&g, 1.0, LenToDic::finite(d).unwrap(), seed, 1).unwrap();
        prop_assert!(plan.region_count >= 1 && plan.region_count <= raw.vertex_count);
        for v in 0..g.vertex_count() {
            if let Some(p) = plan.dict_parent[v] {
                prop_assert_eq!(plan.region_of[p as usize], plan.region_of[v]);
                prop_assert!(!plan.is_root(v as VertexId));
            }
        }
    }
}
