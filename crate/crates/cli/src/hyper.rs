use clap::Args;
use stm::engine::NegativeSampler;
use stm::{AlMode, TrainConfig};

/// Hyperparameter flags shared by `train` and `bench`. Anything left unset
/// falls back to the defaults for the chosen clause count.
#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    /// Number of clauses (n).
    #[arg(long, short = 'n', default_value_t = 100)]
    pub clauses: usize,
    /// Automaton states per action (N); states live in [t, 2N].
    #[arg(long)]
    pub states: Option<u32>,
    /// Lower state threshold (t); literals pushed below it are dropped.
    #[arg(long, short = 't')]
    pub threshold: Option<u32>,
    /// Maximum literals stored per clause (p).
    #[arg(long, short = 'p')]
    pub max_literals: Option<u32>,
    /// Active literal capacity per class (a).
    #[arg(long, short = 'a')]
    pub al_size: Option<usize>,
    /// Voting margin (T). Default round(4 sqrt(n)).
    #[arg(long, short = 'T')]
    pub margin: Option<u32>,
    /// Specificity (s).
    #[arg(long, short = 's')]
    pub specificity: Option<f64>,
    #[arg(long)]
    pub al_mode: Option<AlMode>,
    #[arg(long)]
    pub sampler: Option<NegativeSampler>,
    /// State given to introduced literals. Default N.
    #[arg(long)]
    pub insert_state: Option<u32>,
    /// Literals introduced per Type II event.
    #[arg(long)]
    pub k_intro: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for clause and accuracy evaluation.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl HyperArgs {
    pub fn config(&self, epochs: usize) -> TrainConfig {
        let mut cfg = TrainConfig::for_clauses(self.clauses);
        if let Some(v) = self.states {
            cfg.n_states = v;
            cfg.insert_state = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.max_literals {
            cfg.max_literals = v;
        }
        if let Some(v) = self.al_size {
            cfg.al_size = v;
        }
        if let Some(v) = self.margin {
            cfg.margin = v;
        }
        if let Some(v) = self.specificity {
            cfg.specificity = v;
        }
        if let Some(v) = self.al_mode {
            cfg.al_mode = v;
        }
        if let Some(v) = self.sampler {
            cfg.sampler = v;
        }
        if let Some(v) = self.insert_state {
            cfg.insert_state = v;
        }
        if let Some(v) = self.k_intro {
            cfg.k_intro = v;
        }
        cfg.epochs = epochs;
        cfg.seed = self.seed;
        cfg.threads = self.threads.max(1);
        cfg
    }
}
