//! Subcommand implementations.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use eam_core::dataset::{idx, make_partition, synth, LabeledCorpus};
use eam_core::experiments::{
    report, run_experiment1, run_experiment2, run_experiment3, run_experiment4,
    ExperimentContext, SweepResult,
};
use eam_core::features::{self, io as fio};
use eam_core::util::write_atomic;
use eam_core::{
    Amr, ExtractorSpec, FeatureVector, Label, MemorySystem, QuantizerModel, SamplerPolicy,
};

use crate::config::{InputSource, RunConfig};
use crate::CliError;

fn load_corpus(images: &[PathBuf], labels: &[PathBuf]) -> Result<LabeledCorpus, CliError> {
    let mut corpus: Option<LabeledCorpus> = None;
    for (img_path, lbl_path) in images.iter().zip(labels) {
        let part = LabeledCorpus::new(
            idx::load_idx_images(img_path)?,
            idx::load_idx_labels(lbl_path)?,
        )?;
        corpus = Some(match corpus {
            None => part,
            Some(mut acc) => {
                acc.append(part);
                acc
            }
        });
    }
    corpus.ok_or_else(|| CliError::Usage("no input files".into()))
}

fn build_context(config: &RunConfig) -> Result<ExperimentContext, CliError> {
    let seed = config.seed()?;
    let sampler = config.sampler();
    match config.validated_source()? {
        InputSource::Images(images, labels) => {
            let corpus = load_corpus(&images, &labels)?;
            let ctx =
                ExperimentContext::from_corpus(&corpus, config.extractor()?, sampler, seed)?;
            println!("loaded {} images", ctx.len());
            Ok(ctx)
        }
        InputSource::Features(path) => {
            let rows = fio::import_features(&path)?;
            let n = rows.first().map_or(0, |(_, v)| v.len());
            let extractor = match config.extractor() {
                Ok(spec) if spec.n_features() == n => spec,
                // external features with a geometry the block extractor
                // cannot mirror: keep the table, skip image synthesis
                _ => ExtractorSpec {
                    kind: eam_core::ExtractorKind::External,
                    ..ExtractorSpec::mnist()
                },
            };
            let ctx = ExperimentContext::from_features(rows, extractor, sampler, seed)?;
            println!("loaded {} feature rows from {}", ctx.len(), path.display());
            Ok(ctx)
        }
    }
}

pub fn gen_corpus(count: usize, config: &RunConfig) -> Result<(), CliError> {
    let seed = config.seed()?;
    let dir = config.out_dir()?;
    fs::create_dir_all(dir).map_err(eam_core::Error::from)?;
    let corpus = synth::generate(count, seed);
    let mut buf = Vec::new();
    idx::write_idx_images(&mut buf, corpus.images())?;
    write_atomic(&dir.join("images-idx3-ubyte"), &buf).map_err(eam_core::Error::from)?;
    buf.clear();
    idx::write_idx_labels(&mut buf, corpus.labels())?;
    write_atomic(&dir.join("labels-idx1-ubyte"), &buf).map_err(eam_core::Error::from)?;
    println!("wrote {count} synthetic digits to {}", dir.display());
    Ok(())
}

pub fn extract(config: &RunConfig) -> Result<(), CliError> {
    let InputSource::Images(images, labels) = config.validated_source()? else {
        return Err(CliError::Usage(
            "extract needs --images/--labels input".into(),
        ));
    };
    let out = config
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("an output file is required (--out)".into()))?;
    let corpus = load_corpus(&images, &labels)?;
    let spec = config.extractor()?;
    let rows: Vec<(Label, FeatureVector)> = corpus
        .images()
        .iter()
        .zip(corpus.labels())
        .map(|(img, &label)| Ok((label, features::extract(&spec, img)?)))
        .collect::<Result<_, eam_core::Error>>()?;
    fio::export_features(out, &rows)?;
    println!("wrote {} feature rows to {}", rows.len(), out.display());
    Ok(())
}

fn print_sweep(sweep: &SweepResult) {
    println!("    m  fill%   amr_prec  amr_rec  entropy  sys_prec  sys_rec  avg_acc");
    for p in sweep.fold_means() {
        println!(
            "  {:>3}  {:>5}   {:>8.4} {:>8.4} {:>8.4}  {:>8.4} {:>8.4} {:>8.4}",
            p.m,
            p.fill_pct,
            p.mean.amr_precision,
            p.mean.amr_recall,
            p.mean.amr_entropy,
            p.mean.system_precision,
            p.mean.system_recall,
            p.mean.avg_accepting,
        );
    }
}

pub fn experiment(which: u32, config: &RunConfig) -> Result<(), CliError> {
    let ctx = build_context(config)?;
    let out = config.out_dir()?;
    fs::create_dir_all(out).map_err(eam_core::Error::from)?;
    let folds = config.folds()?;

    let (csv, json) = match which {
        1 | 2 => {
            let m_values = config.m_values();
            let sweep = if which == 1 {
                run_experiment1(&ctx, &m_values, &folds)?
            } else {
                run_experiment2(&ctx, &m_values, &folds)?
            };
            print_sweep(&sweep);
            (report::sweep_csv(which, &sweep), report::sweep_summary_json(which, &sweep)?)
        }
        3 => {
            let sweep = run_experiment3(&ctx, config.fixed_m(), &config.fills(), &folds)?;
            print_sweep(&sweep);
            (report::sweep_csv(3, &sweep), report::sweep_summary_json(3, &sweep)?)
        }
        4 => {
            let samples = config.samples_per_digit.unwrap_or(10);
            let result =
                run_experiment4(&ctx, config.fixed_m(), &config.fills(), &folds, samples)?;
            for (stem, image) in &result.images {
                fio::save_pgm(&out.join(format!("{stem}.pgm")), image)?;
            }
            println!(
                "wrote {} retrieval images; mean Spearman(entropy, distance) = {}",
                result.images.len(),
                result
                    .mean_spearman()
                    .map_or("n/a".into(), |r| format!("{r:.4}")),
            );
            (report::exp4_csv(&result), report::exp4_summary_json(&result)?)
        }
        _ => unreachable!("clap bounds the experiment number"),
    };

    let csv_path = out.join(format!("exp{which}.csv"));
    write_atomic(&csv_path, csv.as_bytes()).map_err(eam_core::Error::from)?;
    let json_path = out.join(format!("exp{which}_summary.json"));
    write_atomic(&json_path, json.as_bytes()).map_err(eam_core::Error::from)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

/// Metadata stored next to the register snapshots.
#[derive(Serialize, Deserialize)]
struct SystemManifest {
    quantizer: QuantizerModel,
    sampler: SamplerPolicy,
    extractor: ExtractorSpec,
    amr_count: usize,
}

pub fn snapshot(fold: usize, config: &RunConfig) -> Result<(), CliError> {
    if fold >= eam_core::dataset::NUM_FOLDS {
        return Err(CliError::Usage(format!("fold {fold} out of range 0..10")));
    }
    let ctx = build_context(config)?;
    let out = config.out_dir()?;
    fs::create_dir_all(out).map_err(eam_core::Error::from)?;
    let m = config.fixed_m();

    let partition = make_partition(ctx.labels(), fold, ctx.seed());
    let quantizer = QuantizerModel::fit(
        partition.train_idx.iter().map(|&i| &ctx.features()[i]),
        m,
    )?;
    let label_sets: Vec<BTreeSet<Label>> = eam_core::experiments::single_label_sets();
    let mut system = MemorySystem::with_label_sets(&label_sets, quantizer, ctx.sampler())?;
    for &i in &partition.rem_idx {
        let f = system.quantizer().quantize(&ctx.features()[i])?;
        system.register(ctx.labels()[i], &f)?;
    }

    let manifest = SystemManifest {
        quantizer: system.quantizer().clone(),
        sampler: system.sampler(),
        extractor: *ctx.extractor(),
        amr_count: system.amrs().len(),
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).expect("serializable manifest") + "\n";
    write_atomic(&out.join("system.json"), manifest_json.as_bytes())
        .map_err(eam_core::Error::from)?;
    for amr in system.amrs() {
        let mut buf = Vec::new();
        amr.write_snapshot(&mut buf)?;
        write_atomic(&out.join(format!("amr_{:03}.eamr", amr.id())), &buf)
            .map_err(eam_core::Error::from)?;
    }
    println!(
        "registered {} items at m={m}; snapshot in {}",
        partition.rem_idx.len(),
        out.display()
    );
    for amr in system.amrs() {
        println!(
            "  amr {} labels {:?} entropy {:.4}",
            amr.id(),
            amr.labels(),
            amr.entropy()
        );
    }
    Ok(())
}

pub fn demo_retrieve(snapshot: &Path, image: &Path, config: &RunConfig) -> Result<(), CliError> {
    let manifest_text =
        fs::read_to_string(snapshot.join("system.json")).map_err(eam_core::Error::from)?;
    let manifest: SystemManifest = serde_json::from_str(&manifest_text).map_err(|e| {
        CliError::Core(eam_core::Error::Parse {
            line: 0,
            reason: format!("system.json: {e}"),
        })
    })?;
    let mut amrs = Vec::with_capacity(manifest.amr_count);
    for id in 0..manifest.amr_count {
        let path = snapshot.join(format!("amr_{id:03}.eamr"));
        let file = fs::File::open(&path).map_err(eam_core::Error::from)?;
        amrs.push(Amr::read_snapshot(id, std::io::BufReader::new(file))?);
    }
    let sampler = config.sampler.unwrap_or(manifest.sampler);
    let system = MemorySystem::new(amrs, manifest.quantizer, sampler)?;

    // input protocol: image -> features -> quantized function on the bus
    let cue_img = fio::load_pgm(image)?;
    let cue_features = features::extract(&manifest.extractor, &cue_img)?;
    let outcome = system.retrieve_vector(&cue_features, config.seed()?)?;

    println!("cue: {}", image.display());
    for amr in system.amrs() {
        println!(
            "  amr {} labels {:?} entropy {:.4} {}",
            amr.id(),
            amr.labels(),
            outcome.entropies[amr.id()],
            if outcome.accepting.contains(&amr.id()) {
                "ACCEPT"
            } else {
                "reject"
            }
        );
    }
    match (&outcome.chosen_amr, &outcome.retrieved) {
        (Some(id), Some(retrieved)) => {
            println!(
                "accepted: register {id} (labels {:?}) selected with minimal entropy",
                system.amrs()[*id].labels()
            );
            // output protocol: levels -> real features -> synthesized image
            let decoded = system.quantizer().dequantize(retrieved)?;
            let img = features::synthesize(&manifest.extractor, &decoded)?;
            let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&out).map_err(eam_core::Error::from)?;
            let path = out.join("retrieved.pgm");
            fio::save_pgm(&path, &img)?;
            println!("retrieved object written to {}", path.display());
        }
        _ => println!("rejected: no register accepted the cue"),
    }
    Ok(())
}
