//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The process fails if any criterion
//! fails, except those listed in `EXPECTED_FAILURES`, which are still
//! reported as FAIL; an expected failure that starts passing also fails the
//! run so the list cannot go stale.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use semnet::extract::{retrieve_terms, tokenize, LemmaMap, RetrievalOptions, Stopwords};
use semnet::forge::{corpus_sentences, count_cooccurrences, ppmi, reduce, write_embedding_kb, Phrases};
use semnet::kb::{load_embedding_kb, Backend, EmbeddingKb, KnowledgeBase, TaxonomyKb};
use semnet::layout::{fa2_step, run, Layout, LayoutConfig, StepState};
use semnet::network::{backbone, graph_stats, max_spanning_tree, BackboneConfig, GraphMeta, WeightedGraph};
use semnet::render::{from_json, to_graphml, to_json, to_svg, SvgStyle};

/// Criteria that cannot hold under the specified update rule; see README.
const EXPECTED_FAILURES: &[&str] = &["5c"];

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut trees = 0;
    for seed in 0..200u64 {
        let n = 2 + (seed % 5) as usize;
        let levels = if seed % 2 == 0 { Some(4) } else { None };
        let m = random_matrix(&mut rng(seed), n, levels);
        let mst = max_spanning_tree(&m);
        ensure(mst.len() == n - 1, || format!("seed {seed}: {} edges", mst.len()))?;
        let got = canonical_sum(mst.iter().map(|e| e.2).collect());
        let best = brute_force_max_tree(&m);
        ensure(got == best, || format!("seed {seed} (N={n}): kruskal {got} vs exhaustive {best}"))?;
        trees += count_trees(n);
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("200 matrices, {trees} spanning trees enumerated"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut r = rng(2);
    let config = BackboneConfig::new(2.0).unwrap();
    for k in 0..100 {
        let n = r.random_range(1..=50);
        let m = random_matrix(&mut r, n, if k % 3 == 0 { Some(5) } else { None });
        let g = backbone(&m, &config, GraphMeta::new("t", n, 2.0, 0));
        let edges: BTreeSet<(usize, usize)> = g.edges.iter().map(|e| (e.source, e.target)).collect();
        let mst: BTreeSet<(usize, usize)> = max_spanning_tree(&m).iter().map(|e| (e.0, e.1)).collect();
        ensure(mst.is_subset(&edges), || format!("matrix {k}: MST not contained"))?;
        ensure(graph_stats(&g).components == 1, || format!("matrix {k}: disconnected"))?;
        let want = (2 * n).min(n * (n - 1) / 2);
        ensure(g.edge_count() == want, || format!("matrix {k} (N={n}): {} edges, want {want}", g.edge_count()))?;
    }
    within(Duration::from_secs(2), start)?;
    Ok("100 matrices, N in 1..=50".into())
}

fn embedding(rows: &[(&str, Vec<f64>)]) -> KnowledgeBase {
    let dims = rows[0].1.len();
    KnowledgeBase::new("e", Backend::Embedding(EmbeddingKb::from_rows(dims, rows.iter().cloned()).unwrap()))
}

fn criterion_3() -> Check {
    // fixture vectors, parsed here independently of the loader
    let text = std::fs::read_to_string(fixture("embedding_kb.txt")).unwrap();
    let rows: Vec<(String, Vec<f64>)> = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let term = it.next().unwrap().to_lowercase();
            (term, it.map(|x| x.parse().unwrap()).collect())
        })
        .collect();
    let kb = load_embedding_kb(&fixture("embedding_kb.txt")).unwrap();
    for (a, va) in &rows {
        for (b, vb) in &rows {
            let want = cosine(va, vb).clamp(0.0, 1.0);
            let got = kb.similarity(a, b).unwrap();
            ensure((got - want).abs() <= 1e-12, || format!("cos({a},{b}) = {got}, oracle {want}"))?;
        }
    }
    let pair = embedding(&[("a", vec![3.0, 4.0]), ("b", vec![4.0, 3.0]), ("c", vec![-4.0, -3.0])]);
    let s = pair.similarity("a", "b").unwrap();
    ensure((s - 0.96).abs() <= 1e-12, || format!("(3,4)·(4,3) gave {s}"))?;
    ensure(pair.similarity("a", "c").unwrap() == 0.0, || "negative cosine not clamped".into())?;

    let chain = "S\ta\talpha\nS\tb\tbeta\nS\tc\tgamma\nS\td\tdelta\nE\ta\tb\nE\tb\tc\n";
    let tax = KnowledgeBase::new("t", Backend::Taxonomy(TaxonomyKb::parse(chain).unwrap()));
    for (a, b, want) in
        [("alpha", "alpha", 1.0), ("alpha", "beta", 0.5), ("alpha", "gamma", 1.0 / 3.0), ("alpha", "delta", 0.0)]
    {
        let got = tax.similarity(a, b).unwrap();
        ensure(got == want, || format!("path({a},{b}) = {got}, want {want}"))?;
    }

    let mut pairs = 0;
    for seed in 0..100 {
        let t = RandomTaxonomy::generate(&mut rng(1000 + seed), 20);
        let kb = KnowledgeBase::new("r", Backend::Taxonomy(TaxonomyKb::parse(&t.to_text()).unwrap()));
        let dist = t.distances();
        for a in t.lemmas() {
            for b in t.lemmas() {
                let (got, want) = (kb.similarity(&a, &b).unwrap(), t.path_similarity(&dist, &a, &b));
                ensure(got == want, || format!("taxonomy {seed}: sim({a},{b}) = {got}, oracle {want}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{} fixture pairs within 1e-12, {pairs} taxonomy pairs exact", rows.len() * rows.len()))
}

fn criterion_4() -> Check {
    let lexicon = embedding(&[
        ("spherical_shell", vec![1.0, 0.2, 0.0]),
        ("shell", vec![0.8, 0.1, 0.3]),
        ("robot", vec![0.1, 1.0, 0.2]),
        ("seal", vec![0.3, 0.4, 0.9]),
    ]);
    let sentence = tokenize("The spherical shell seals the robot.");
    let mut options = RetrievalOptions { stopwords: Stopwords::from_iter(["the"]), ..RetrievalOptions::default() };
    let plain = retrieve_terms(&sentence, &lexicon, &options);
    ensure(plain.terms == ["spherical_shell", "robot"], || format!("without lemmas: {:?}", plain.terms))?;
    options.lemmas = Some(LemmaMap::from_iter([("seals", "seal")]));
    let lemmatized = retrieve_terms(&sentence, &lexicon, &options);
    ensure(lemmatized.terms == ["spherical_shell", "seal", "robot"], || {
        format!("with lemmas: {:?}", lemmatized.terms)
    })?;

    let audit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("spherical_robot.audit.json")).unwrap()).unwrap();
    let want: Vec<usize> =
        ["unigrams", "bigrams", "trigrams"].iter().map(|k| audit[k].as_u64().unwrap() as usize).collect();
    let kb = load_embedding_kb(&fixture("embedding_kb.txt")).unwrap();
    let text = std::fs::read_to_string(fixture("spherical_robot.txt")).unwrap();
    let first = retrieve_terms(&tokenize(&text), &kb, &RetrievalOptions::default());
    let got = first.ngram_counts()[..3].to_vec();
    ensure(got == want, || format!("uni/bi/tri {got:?}, audit {want:?}"))?;
    let again = retrieve_terms(&tokenize(&text), &kb, &RetrievalOptions::default());
    ensure(first.to_json() == again.to_json(), || "repeated retrieval differs".into())?;
    Ok(format!("N=2 / N=3 on the sentence; spherical robot {} ({})", first.summary(), "matches audit"))
}

fn distance(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

fn lone_node() -> WeightedGraph {
    WeightedGraph::from_edges(&["x".to_string()], [], GraphMeta::new("t", 1, 2.0, 0))
}

fn criterion_5a() -> Check {
    let kb = load_embedding_kb(&fixture("embedding_kb.txt")).unwrap();
    let text = std::fs::read_to_string(fixture("spherical_robot.txt")).unwrap();
    let terms = retrieve_terms(&tokenize(&text), &kb, &RetrievalOptions::default());
    let m = semnet::network::build_similarity_matrix(&terms, &kb).unwrap();
    let g = backbone(&m, &BackboneConfig::new(2.0).unwrap(), GraphMeta::new("kb", m.n(), 2.0, 42));
    let random = random_laid_out_graph(&mut rng(55), 80).0;
    for graph in [&g, &random] {
        let cfg = LayoutConfig::default();
        let a = semnet::layout::layout_graph(graph, &cfg);
        let b = semnet::layout::layout_graph(graph, &cfg);
        let bits = |l: &Layout| l.positions.iter().flat_map(|p| [p[0].to_bits(), p[1].to_bits()]).collect::<Vec<_>>();
        ensure(bits(&a) == bits(&b), || "layouts differ between runs".into())?;
    }
    Ok("bit-identical repeats".into())
}

fn criterion_5b() -> Check {
    let g = WeightedGraph::from_edges(&["a".to_string(), "b".to_string()], [], GraphMeta::new("t", 2, 2.0, 0));
    let cfg = LayoutConfig { k_g: 0.0, iterations: 100, convergence_eps: 0.0, ..LayoutConfig::default() };
    let mut d = Vec::new();
    run(&g, &cfg, |s| {
        d.push(distance([
            s.layout.positions[0][0] - s.layout.positions[1][0],
            s.layout.positions[0][1] - s.layout.positions[1][1],
        ]))
    });
    let bad = d.windows(2).position(|w| w[1] <= w[0]);
    ensure(d.len() >= 50 && bad.is_none(), || format!("distance stopped increasing at iteration {bad:?}"))?;
    Ok(format!("{} iterations strictly increasing", d.len()))
}

/// Distance to the origin of a lone node under gravity, step by step.
fn gravity_trace(start: [f64; 2], cfg: &LayoutConfig, steps: usize) -> Vec<f64> {
    let g = lone_node();
    let mut layout = Layout { positions: vec![start], iterations_run: 0, converged: false };
    let mut state = StepState::new(1);
    let mut out = vec![distance(start)];
    for _ in 0..steps {
        let step = fa2_step(&g, &layout, &state, cfg);
        layout = step.layout;
        state = step.state;
        out.push(distance(layout.positions[0]));
    }
    out
}

fn criterion_5c() -> Check {
    let cfg = LayoutConfig::default();
    let floor = cfg.convergence_eps * 10.0;
    let mut starts = vec![[10.0, 0.0]];
    for seed in [42, 1, 2] {
        starts.push(semnet::layout::init_positions(&lone_node(), seed).positions[0]);
    }
    for start in starts {
        let d = gravity_trace(start, &cfg, cfg.iterations);
        for (i, w) in d.windows(2).enumerate() {
            if w[0] < floor {
                break;
            }
            ensure(w[1] < w[0], || {
                format!(
                    "start ({:.3},{:.3}): distance {:.4} -> {:.4} at iteration {}, never below {floor}",
                    start[0],
                    start[1],
                    w[0],
                    w[1],
                    i + 1
                )
            })?;
        }
        ensure(d.iter().any(|&x| x < floor), || format!("never reached {floor}"))?;
    }
    Ok("strictly decreasing to below the convergence floor".into())
}

fn criterion_5d() -> Check {
    let mut r = rng(5);
    let mut max_n = 0;
    for k in 0..100 {
        let n = r.random_range(1..=100);
        max_n = max_n.max(n);
        let m = random_matrix(&mut r, n, None);
        let g = backbone(&m, &BackboneConfig::new(2.0).unwrap(), GraphMeta::new("t", n, 2.0, k));
        let cfg = LayoutConfig { seed: k, convergence_eps: 0.0, ..LayoutConfig::default() };
        let mut finite = true;
        let layout = run(&g, &cfg, |s| finite &= s.layout.positions.iter().flatten().all(|c| c.is_finite()));
        ensure(finite && layout.iterations_run == 600, || format!("graph {k} (N={n}): non-finite coordinate"))?;
    }
    Ok(format!("100 graphs up to N={max_n}, 600 iterations each"))
}

fn criterion_6() -> Check {
    let mut tokens = 0;
    for seed in 0..100 {
        let corpus = random_corpus(&mut rng(600 + seed), 500);
        tokens += corpus.iter().map(Vec::len).sum::<usize>();
        let window = 1 + (seed as usize % 6);
        let counts = count_cooccurrences(&corpus, window, None, 1).unwrap();
        let oracle = brute_force_pairs(&corpus, window);
        let mut total = 0;
        for (i, a) in counts.vocab.iter().enumerate() {
            for (j, b) in counts.vocab.iter().enumerate() {
                let want = oracle.get(&(a.clone(), b.clone())).copied().unwrap_or(0);
                ensure(counts.get(i, j) == want, || format!("corpus {seed}: count({a},{b})"))?;
                total += want;
            }
        }
        ensure(total == oracle.values().sum::<u64>(), || format!("corpus {seed}: missing pairs"))?;
    }

    let abab = vec!["a b a b".split(' ').map(String::from).collect::<Vec<_>>()];
    let counts = count_cooccurrences(&abab, 1, None, 1).unwrap();
    let v = ppmi(&counts).unwrap().dense()[(0, 1)];
    ensure((v - std::f64::consts::LN_2).abs() <= 1e-12, || format!("PPMI(a,b) = {v}"))?;

    let corpus = std::fs::read_to_string(fixture("forge_corpus.txt")).unwrap();
    let phrases = Phrases::parse(&std::fs::read_to_string(fixture("forge_phrases.txt")).unwrap());
    let counts = count_cooccurrences(&corpus_sentences(&corpus), 5, Some(&phrases), 1).unwrap();
    let vectors = ppmi(&counts).unwrap();
    let dense = vectors.dense_rows();
    let full = reduce(&vectors, vectors.vocab.len(), 42).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..dense.len() {
        for j in 0..dense.len() {
            worst = worst.max((cosine(&dense[i], &dense[j]) - cosine(&full[i], &full[j])).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("full-rank cosine error {worst:e}"))?;

    let reduced = reduce(&vectors, 50, 42).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forged.txt");
    write_embedding_kb(&vectors.vocab, &reduced, &path).unwrap();
    let kb = load_embedding_kb(&path).unwrap();
    let mut round: f64 = 0.0;
    for (i, a) in vectors.vocab.iter().enumerate() {
        for (j, b) in vectors.vocab.iter().enumerate() {
            if kb.contains(a) && kb.contains(b) {
                let want = cosine(&reduced[i], &reduced[j]).clamp(0.0, 1.0);
                round = round.max((kb.similarity(a, b).unwrap() - want).abs());
            }
        }
    }
    ensure(round <= 1e-9, || format!("round-trip error {round:e}"))?;
    Ok(format!(
        "100 corpora ({tokens} tokens) recounted; ln 2 ok; full-rank cos err {worst:.1e}; round-trip err {round:.1e}"
    ))
}

fn semnet(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_semnet")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let corpus = fixture("forge_corpus.txt");
    let phrases = fixture("forge_phrases.txt");
    let text = fixture("spherical_robot.txt");
    semnet(&[
        "forge",
        corpus.to_str().unwrap(),
        "--phrases",
        phrases.to_str().unwrap(),
        "--out",
        &p("forged.txt"),
        "--quiet",
    ])?;
    for run in ["one", "two"] {
        semnet(&[
            "pipeline",
            "--kb",
            &p("forged.txt"),
            "--text",
            text.to_str().unwrap(),
            "--out-prefix",
            &p(run),
            "--quiet",
        ])?;
    }
    let read = |name: String| std::fs::read_to_string(name).unwrap();
    for ext in ["terms.json", "graph.json", "layout.json", "json", "graphml", "dot", "svg"] {
        ensure(read(p(&format!("one.{ext}"))) == read(p(&format!("two.{ext}"))), || {
            format!("{ext} differs between runs")
        })?;
    }
    let doc = read(p("one.json"));
    let (graph, layout) = from_json(&doc).map_err(|e| e.to_string())?;
    let n = graph.node_count();
    ensure(graph_stats(&graph).components == 1, || "graph is disconnected".into())?;
    let want = (2 * n).min(n * (n - 1) / 2);
    ensure(graph.edge_count() == want, || format!("{} edges, want {want}", graph.edge_count()))?;
    let svg = xml_counts(&read(p("one.svg"))).map_err(|e| e.to_string())?;
    ensure(svg.get("circle") == Some(&n), || format!("{:?} circles for {n} nodes", svg.get("circle")))?;
    ensure(to_json(&graph, layout.as_ref()).unwrap() == doc, || "JSON round-trip changed the document".into())?;
    within(Duration::from_secs(10), start)?;
    Ok(format!("N={n}, {} edges, {:.2}s", graph.edge_count(), start.elapsed().as_secs_f64()))
}

fn criterion_8() -> Check {
    let mut r = rng(8);
    for k in 0..50 {
        let (graph, layout) = random_laid_out_graph(&mut r, 60);
        let svg = xml_counts(&to_svg(&graph, &layout, &SvgStyle::default()).unwrap())
            .map_err(|e| format!("graph {k}: SVG: {e}"))?;
        let gml =
            xml_counts(&to_graphml(&graph, Some(&layout)).unwrap()).map_err(|e| format!("graph {k}: GraphML: {e}"))?;
        let count = |m: &std::collections::HashMap<String, usize>, tag: &str| m.get(tag).copied().unwrap_or(0);
        ensure(count(&svg, "circle") == graph.node_count() && count(&svg, "line") == graph.edge_count(), || {
            format!("graph {k}: SVG element counts")
        })?;
        ensure(count(&gml, "node") == graph.node_count() && count(&gml, "edge") == graph.edge_count(), || {
            format!("graph {k}: GraphML element counts")
        })?;
    }
    Ok("50 random graphs parse with matching counts".into())
}

fn main() {
    let criteria: &[Criterion] = &[
        ("1", "MST equals exhaustive maximum", criterion_1),
        ("2", "backbone structure", criterion_2),
        ("3", "similarity oracles", criterion_3),
        ("4", "extraction fixtures", criterion_4),
        ("5a", "layout determinism", criterion_5a),
        ("5b", "two-body repulsion", criterion_5b),
        ("5c", "lone-node gravity", criterion_5c),
        ("5d", "layout finiteness", criterion_5d),
        ("6", "kbforge oracles", criterion_6),
        ("7", "end-to-end desk run", criterion_7),
        ("8", "renderer well-formedness", criterion_8),
    ];
    let mut unexpected = Vec::new();
    let mut layout_time = Duration::ZERO;
    for &(id, name, check) in criteria {
        let started = Instant::now();
        let result = check();
        let elapsed = started.elapsed();
        if id.starts_with('5') {
            layout_time += elapsed;
        }
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        match &result {
            Ok(detail) => println!("PASS {id:<3} {name}: {detail} [{:.2}s]", elapsed.as_secs_f64()),
            Err(why) => println!(
                "FAIL {id:<3} {name}: {why} [{:.2}s]{}",
                elapsed.as_secs_f64(),
                if expected_fail { " (expected)" } else { "" }
            ),
        }
        if result.is_ok() == expected_fail {
            unexpected.push(id);
        }
    }
    let layout_ok = layout_time < Duration::from_secs(30);
    println!(
        "{} 5   layout properties total time: {:.2}s (limit 30s)",
        if layout_ok { "PASS" } else { "FAIL" },
        layout_time.as_secs_f64()
    );
    if !layout_ok {
        unexpected.push("5");
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected ({} expected failure)", EXPECTED_FAILURES.len());
    } else {
        println!("acceptance: unexpected outcome for {unexpected:?}");
        std::process::exit(1);
    }
}
