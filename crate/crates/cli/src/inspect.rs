use std::path::PathBuf;

use clap::Args;
use stm::{export_rules, load_model, memory_bound};

use crate::error::{in_file, CliResult};

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub model: PathBuf,
    /// Print the k strongest clauses as rules.
    #[arg(long, value_name = "K")]
    pub rules: Option<usize>,
    /// Print rules as JSON instead of text.
    #[arg(long, requires = "rules")]
    pub json: bool,
    /// Print the memory accounting.
    #[arg(long)]
    pub memory: bool,
    /// Print active literal occupancy per class.
    #[arg(long)]
    pub al_occupancy: bool,
}

pub fn run(args: &InspectArgs) -> CliResult<()> {
    let model = in_file(load_model(&args.model), &args.model)?;
    let cfg = model.config();
    let summary_only = args.rules.is_none() && !args.memory && !args.al_occupancy;

    if summary_only {
        println!("features (o): {}", model.feature_count());
        println!("classes (m): {}", model.class_count());
        println!("clauses (n): {}", cfg.clauses);
        println!(
            "N={} t={} p={} a={} T={} s={} al_mode={} sampler={}",
            cfg.n_states, cfg.threshold, cfg.max_literals, cfg.al_size, cfg.margin, cfg.specificity, cfg.al_mode, cfg.sampler
        );
        println!("stored literals: {}", model.bank().stored_literals());
        println!("mean clause size: {:.3}", model.bank().mean_clause_size());
        println!("vocabulary: {}", if model.meta.vocabulary.is_some() { "embedded" } else { "none" });
    }
    if let Some(k) = args.rules {
        let rules = export_rules(&model, k);
        if args.json {
            println!("{}", serde_json::to_string_pretty(&rules)?);
        } else {
            for r in &rules {
                println!("{r}");
            }
        }
    }
    if args.memory {
        let bound = memory_bound(cfg.clauses, cfg.max_literals as usize, model.class_count() as usize, cfg.al_size);
        println!("memory bytes: {}", model.memory_bytes());
        println!("memory bound: {bound}");
    }
    if args.al_occupancy {
        for (class, used) in model.active_literals().occupancy().iter().enumerate() {
            let name = model.meta.class_names.as_ref().map_or(class.to_string(), |n| n[class].clone());
            println!("class {name}: {used}/{}", cfg.al_size);
        }
    }
    Ok(())
}
