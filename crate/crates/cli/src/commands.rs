use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use wikivec::eval::{
    common_subset_eval, eval_similarity_with, load_similarity_pairs, CommonSubsetTable, PairScorer,
    SimilarityDataset, VectorScorer,
};
use wikivec::wiki::{parse_concept_token, IngestOptions};
use wikivec::{
    analogy_query, build_corpus, build_vocab, eval_analogy, eval_analogy_commons, init_model,
    link_similarity, load_analogy_questions, load_text, nearest, save_text, train, AnalogyReport,
    LinkGraph, PageId, SenseIndex, SimilarityReport, TrainingConfig, VectorSet,
};

use crate::args::*;
use crate::Failure;

/// Files a command read and wrote.
#[derive(Default)]
pub struct Artifacts {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

fn require(paths: &[&Path]) -> Result<(), Failure> {
    for path in paths {
        if !path.exists() {
            return Err(Failure::Usage(format!(
                "no such file or directory: {}",
                path.display()
            )));
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(path, e))
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn set_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn ingest(args: &IngestArgs) -> Result<Artifacts, Failure> {
    require(&[&args.dump])?;
    let opts = IngestOptions {
        mode: args.mode,
        workers: if args.ordered { 1 } else { args.workers.max(1) },
        ordered: args.ordered,
        collect_anchor_stats: args.anchor_stats.is_some(),
    };
    let output = build_corpus(&args.dump, &args.out, &opts)?;
    let mut outputs = vec![args.out.clone()];
    if let (Some(path), Some(stats)) = (&args.anchor_stats, &output.anchor_stats) {
        let file = File::create(path).map_err(|e| Failure::io(path, e))?;
        stats.write_tsv(BufWriter::new(file))?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.stats {
        write_json(path, &output.stats)?;
        outputs.push(path.clone());
    }
    print_json(&output.stats);
    Ok(Artifacts {
        inputs: vec![args.dump.clone()],
        outputs,
    })
}

pub fn training_config(args: &TrainArgs) -> TrainingConfig {
    TrainingConfig {
        dim: args.dim,
        window: args.window,
        negatives: args.negative,
        epochs: args.epochs,
        lr_initial: args.lr,
        subsample_t: args.subsample,
        min_count: args.min_count,
        seed: args.seed,
        workers: args.workers,
    }
}

pub fn train_vectors(args: &TrainArgs) -> Result<Artifacts, Failure> {
    require(&[&args.corpus])?;
    if let Some(init) = &args.init {
        require(&[init])?;
    }
    let config = training_config(args);
    config
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let file = File::open(&args.corpus).map_err(|e| Failure::io(&args.corpus, e))?;
    let vocab = build_vocab(BufReader::new(file), config.min_count)?;
    let pretrained = args.init.as_deref().map(load_text).transpose()?;
    let model = init_model(&vocab, &config, pretrained.as_ref())?;
    let model = train(&args.corpus, model, &config)?;
    save_text(&model.to_vector_set(), &args.out)?;
    eprintln!(
        "{} vectors of dimension {} written to {}",
        vocab.len(),
        config.dim,
        args.out.display()
    );

    let mut inputs = vec![args.corpus.clone()];
    inputs.extend(args.init.clone());
    Ok(Artifacts {
        inputs,
        outputs: vec![args.out.clone()],
    })
}

fn lookup<'a>(set: &'a VectorSet, token: &str) -> Option<&'a [f32]> {
    set.get(token).or_else(|| set.get(&token.to_lowercase()))
}

pub fn similar(args: &SimilarArgs) -> Result<Artifacts, Failure> {
    require(&[&args.vectors])?;
    let set = load_text(&args.vectors)?;
    let query = lookup(&set, &args.query)
        .ok_or_else(|| wikivec::Error::NotInVocabulary(vec![args.query.clone()]))?;
    let exclude = [args.query.as_str(), &args.query.to_lowercase()];
    let neighbors = nearest(&set, query, args.k, &exclude)?;
    if args.json {
        let rows: Vec<_> = neighbors
            .iter()
            .map(|n| json!({"token": n.token, "cosine": n.cosine}))
            .collect();
        print_json(&json!({"query": args.query, "neighbors": rows}));
    } else {
        for (rank, n) in neighbors.iter().enumerate() {
            println!("{:>3}  {:<30} {:.4}", rank + 1, n.token, n.cosine);
        }
    }
    Ok(Artifacts {
        inputs: vec![args.vectors.clone()],
        ..Artifacts::default()
    })
}

pub fn analogy(args: &AnalogyArgs) -> Result<Artifacts, Failure> {
    require(&[&args.vectors])?;
    let set = load_text(&args.vectors)?;
    println!("{}", analogy_query(&set, &args.a, &args.b, &args.c)?);
    Ok(Artifacts {
        inputs: vec![args.vectors.clone()],
        ..Artifacts::default()
    })
}

#[derive(Serialize)]
struct SetReports {
    name: String,
    path: PathBuf,
    all: Vec<AnalogyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    commons: Option<Vec<AnalogyReport>>,
}

fn percent(r: &AnalogyReport) -> String {
    r.accuracy_percent()
        .map_or("-".into(), |p| format!("{p:.1}"))
}

fn analogy_table(sets: &[SetReports], buckets: &[usize]) {
    let mut header = format!("{:<20}", "vectors");
    for b in buckets {
        header.push_str(&format!(" | {:>10} {:>7}", format!("#found@{b}"), "acc%"));
    }
    for (label, commons) in [("All", false), ("Commons", true)] {
        if commons && sets.iter().all(|s| s.commons.is_none()) {
            continue;
        }
        println!("Accuracy ({label})");
        println!("{header}");
        for s in sets {
            let reports = if commons {
                s.commons.as_ref().unwrap()
            } else {
                &s.all
            };
            let mut row = format!("{:<20}", s.name);
            for r in reports {
                row.push_str(&format!(" | {:>10} {:>7}", r.found, percent(r)));
            }
            println!("{row}");
        }
        println!();
    }
}

pub fn eval_analogy_cmd(args: &EvalAnalogyArgs) -> Result<Artifacts, Failure> {
    if args.commons && args.vectors.len() < 2 {
        return Err(Failure::Usage(
            "--commons needs at least two vector sets".into(),
        ));
    }
    if args.buckets.is_empty() {
        return Err(Failure::Usage(
            "--buckets must list at least one cap".into(),
        ));
    }
    let paths: Vec<&Path> = args.vectors.iter().map(PathBuf::as_path).collect();
    require(&paths)?;
    require(&[&args.questions])?;

    let questions = load_analogy_questions(&args.questions)?;
    let sets = args
        .vectors
        .iter()
        .map(|p| load_text(p))
        .collect::<wikivec::Result<Vec<_>>>()?;
    let commons = if args.commons {
        let refs: Vec<&VectorSet> = sets.iter().collect();
        Some(eval_analogy_commons(&refs, &questions, &args.buckets)?)
    } else {
        None
    };
    let mut reports = Vec::new();
    for (i, (set, path)) in sets.iter().zip(&args.vectors).enumerate() {
        reports.push(SetReports {
            name: set_name(path),
            path: path.clone(),
            all: eval_analogy(set, &questions, &args.buckets)?,
            commons: commons.as_ref().map(|c| c[i].clone()),
        });
    }

    let report = json!({"questions": questions.len(), "buckets": args.buckets, "sets": reports});
    if args.json {
        print_json(&report);
    } else {
        analogy_table(&reports, &args.buckets);
    }
    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        outputs.push(out.clone());
    }
    let mut inputs = args.vectors.clone();
    inputs.push(args.questions.clone());
    Ok(Artifacts { inputs, outputs })
}

fn rho(r: Option<f64>) -> String {
    r.map_or("-".into(), |x| format!("{x:.3}"))
}

fn similarity_table(
    names: &[String],
    datasets: &[SimilarityDataset],
    reports: &[Vec<SimilarityReport>],
) {
    let mut header = format!("{:<16} {:>6}", "dataset", "pairs");
    for n in names {
        header.push_str(&format!(" | {:>14} {:>9}", format!("rho {n}"), "not found"));
    }
    println!("{header}");
    for (d, dataset) in datasets.iter().enumerate() {
        let mut row = format!("{:<16} {:>6}", dataset.name, dataset.pairs.len());
        for per_scorer in reports {
            let r = &per_scorer[d];
            row.push_str(&format!(" | {:>14} {:>9}", rho(r.rho), r.not_found));
        }
        println!("{row}");
    }
    println!();
}

fn common_subset_table(table: &CommonSubsetTable) {
    println!("Common subset");
    let mut header = format!("{:<16} {:>6}", "dataset", "common");
    for n in &table.scorers {
        header.push_str(&format!(" | {:>14}", format!("rho {n}")));
    }
    println!("{header}");
    for row in &table.rows {
        let mut line = format!("{:<16} {:>6}", row.dataset, row.pairs_common);
        for r in &row.rho {
            line.push_str(&format!(" | {:>14}", rho(*r)));
        }
        println!("{line}");
    }
    let mut line = format!("{:<16} {:>6}", "average", "");
    for r in &table.average {
        line.push_str(&format!(" | {:>14}", rho(*r)));
    }
    println!("{line}");
    if !table.skipped.is_empty() {
        println!(
            "skipped (fewer than two common pairs): {}",
            table.skipped.join(", ")
        );
    }
}

fn load_datasets(dir: &Path) -> Result<Vec<SimilarityDataset>, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| load_similarity_pairs(f).map_err(Failure::from))
        .collect()
}

pub fn eval_similarity_cmd(args: &EvalSimilarityArgs) -> Result<Artifacts, Failure> {
    let scorer_count = args.vectors.len() + usize::from(args.graph.is_some());
    if scorer_count == 0 {
        return Err(Failure::Usage("give --vectors, --graph or both".into()));
    }
    if args.common_subset && scorer_count < 2 {
        return Err(Failure::Usage(
            "--common-subset needs at least two scorers".into(),
        ));
    }
    let mut inputs: Vec<PathBuf> = args.vectors.clone();
    inputs.extend(args.graph.clone());
    inputs.push(args.pairs.clone());
    inputs.push(args.sense_index.clone());
    let paths: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    require(&paths)?;
    if !args.pairs.is_dir() {
        return Err(Failure::Usage(format!(
            "--pairs must be a directory: {}",
            args.pairs.display()
        )));
    }

    let senses = SenseIndex::load(&args.sense_index)?;
    let datasets = load_datasets(&args.pairs)?;
    let sets = args
        .vectors
        .iter()
        .map(|p| load_text(p))
        .collect::<wikivec::Result<Vec<_>>>()?;
    let graph = args.graph.as_deref().map(LinkGraph::load).transpose()?;

    let vector_scorers: Vec<VectorScorer> = sets.iter().map(VectorScorer::new).collect();
    let mut names: Vec<String> = args.vectors.iter().map(|p| set_name(p)).collect();
    let mut scorers: Vec<&dyn PairScorer> = vector_scorers
        .iter()
        .map(|s| s as &dyn PairScorer)
        .collect();
    if let Some(g) = &graph {
        names.push("links".into());
        scorers.push(g);
    }

    let reports: Vec<Vec<SimilarityReport>> = scorers
        .iter()
        .map(|s| {
            datasets
                .iter()
                .map(|d| eval_similarity_with(*s, d, &senses))
                .collect()
        })
        .collect();
    let common = if args.common_subset {
        let named: Vec<(&str, &dyn PairScorer)> = names
            .iter()
            .map(String::as_str)
            .zip(scorers.iter().copied())
            .collect();
        Some(common_subset_eval(&named, &datasets, &senses)?)
    } else {
        None
    };

    let per_scorer: Vec<_> = names
        .iter()
        .zip(&reports)
        .map(|(n, r)| json!({"name": n, "reports": r}))
        .collect();
    let report = json!({"scorers": per_scorer, "common_subset": common});
    if args.json {
        print_json(&report);
    } else {
        similarity_table(&names, &datasets, &reports);
        if let Some(table) = &common {
            common_subset_table(table);
        }
    }
    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        outputs.push(out.clone());
    }
    if let Some(g) = &args.graph {
        inputs.push(LinkGraph::sidecar_path(g));
    }
    Ok(Artifacts { inputs, outputs })
}

pub fn baseline_build(args: &BaselineBuildArgs) -> Result<Artifacts, Failure> {
    require(&[&args.dump])?;
    let graph = LinkGraph::from_dump(&args.dump)?;
    graph.save(&args.out)?;
    print_json(&graph.summary());
    Ok(Artifacts {
        inputs: vec![args.dump.clone()],
        outputs: vec![args.out.clone(), LinkGraph::sidecar_path(&args.out)],
    })
}

pub fn baseline_sim(args: &BaselineSimArgs) -> Result<Artifacts, Failure> {
    require(&[&args.graph])?;
    let graph = LinkGraph::load(&args.graph)?;
    println!(
        "{}",
        link_similarity(&graph, PageId(args.a), PageId(args.b))?
    );
    Ok(Artifacts {
        inputs: vec![args.graph.clone(), LinkGraph::sidecar_path(&args.graph)],
        ..Artifacts::default()
    })
}

#[derive(Serialize, Default)]
struct CorpusCounts {
    lines: u64,
    tokens: u64,
    types: usize,
    concept_tokens: u64,
    concept_types: usize,
}

fn corpus_counts(path: &Path) -> Result<CorpusCounts, Failure> {
    use std::collections::HashSet;
    use std::io::BufRead;
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    let mut counts = CorpusCounts::default();
    let mut types = HashSet::new();
    let mut concepts = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Failure::io(path, e))?;
        counts.lines += 1;
        for token in line.split_ascii_whitespace() {
            counts.tokens += 1;
            if parse_concept_token(token).is_some() {
                counts.concept_tokens += 1;
                concepts.insert(token.to_string());
            } else {
                types.insert(token.to_string());
            }
        }
    }
    counts.concept_types = concepts.len();
    counts.types = types.len() + concepts.len();
    Ok(counts)
}

pub fn stats(args: &StatsArgs) -> Result<Artifacts, Failure> {
    let mut inputs = Vec::new();
    let mut report = serde_json::Map::new();
    if let Some(path) = &args.corpus {
        require(&[path])?;
        report.insert("corpus".into(), json!(corpus_counts(path)?));
        inputs.push(path.clone());
    }
    if let Some(path) = &args.vectors {
        require(&[path])?;
        let set = load_text(path)?;
        let concepts = set
            .tokens()
            .iter()
            .filter(|t| parse_concept_token(t).is_some())
            .count();
        report.insert(
            "vectors".into(),
            json!({"rows": set.len(), "dim": set.dim(), "concepts": concepts, "words": set.len() - concepts}),
        );
        inputs.push(path.clone());
    }
    if let Some(path) = &args.graph {
        require(&[path])?;
        let graph = LinkGraph::load(path)?;
        report.insert("graph".into(), json!(graph.summary()));
        inputs.push(path.clone());
        inputs.push(LinkGraph::sidecar_path(path));
    }
    print_json(&report);
    Ok(Artifacts {
        inputs,
        ..Artifacts::default()
    })
}
