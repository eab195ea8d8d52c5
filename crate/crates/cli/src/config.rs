//! Run configuration, resolved from defaults, a JSON config file, the
//! environment and command-line flags, later layers winning.

use std::path::{Path, PathBuf};

use layman_eval::datapipe::{ChatProviderKind, ChatProviderSpec};
use layman_eval::embedkit::{EmbeddingProviderSpec, ProviderKind};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_FILE_NAME: &str = "layman-eval.json";
pub const ENV_EMBED_URL: &str = "LAYMAN_EVAL_EMBED_URL";
pub const ENV_CHAT_URL: &str = "LAYMAN_EVAL_CHAT_URL";
pub const ENV_API_KEY: &str = "LAYMAN_EVAL_API_KEY";
pub const ENV_CACHE: &str = "LAYMAN_EVAL_CACHE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub embedding: EmbeddingProviderSpec,
    pub chat: ChatProviderSpec,
    pub theta: f64,
    pub dedup_threshold: f64,
    pub batch_size: usize,
    pub max_iterations: usize,
    pub cache: Option<PathBuf>,
    pub parallelism: Option<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            embedding: EmbeddingProviderSpec::default(),
            chat: ChatProviderSpec::default(),
            theta: 0.8,
            dedup_threshold: 0.8,
            batch_size: 50,
            max_iterations: 3,
            cache: None,
            parallelism: None,
            seed: 0,
        }
    }
}

/// Flag-level overrides; `None` leaves the lower layers in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub embed_kind: Option<ProviderKind>,
    pub embed_dim: Option<usize>,
    pub embed_url: Option<String>,
    pub embed_model: Option<String>,
    pub embed_table: Option<PathBuf>,
    pub embed_instruction: Option<String>,
    pub chat_kind: Option<ChatProviderKind>,
    pub chat_url: Option<String>,
    pub chat_model: Option<String>,
    pub glossary: Option<PathBuf>,
    pub fix_table: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub theta: Option<f64>,
    pub dedup_threshold: Option<f64>,
    pub batch_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
}

fn rebase(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl RunConfig {
    /// Parses a config document; relative paths in it are taken relative to `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, String> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        rebase(base, &mut cfg.cache);
        rebase(base, &mut cfg.embedding.table_path);
        rebase(base, &mut cfg.chat.glossary_path);
        rebase(base, &mut cfg.chat.fix_table_path);
        Ok(cfg)
    }

    pub fn apply_env(&mut self, env: &dyn Fn(&str) -> Option<String>) {
        let get = |k: &str| env(k).filter(|v| !v.is_empty());
        if let Some(url) = get(ENV_EMBED_URL) {
            self.embedding.endpoint = Some(url);
        }
        if let Some(url) = get(ENV_CHAT_URL) {
            self.chat.endpoint = Some(url);
        }
        if let Some(key) = get(ENV_API_KEY) {
            self.embedding.api_key = Some(key.clone());
            self.chat.api_key = Some(key);
        }
        if let Some(cache) = get(ENV_CACHE) {
            self.cache = Some(PathBuf::from(cache));
        }
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        set(&mut self.embedding.kind, &o.embed_kind);
        set(&mut self.embedding.dim, &o.embed_dim);
        set_opt(&mut self.embedding.endpoint, &o.embed_url);
        set_opt(&mut self.embedding.model, &o.embed_model);
        set(&mut self.embedding.instruction, &o.embed_instruction);
        if o.embed_table.is_some() {
            self.embedding.table_path = o.embed_table.clone();
            if o.embed_kind.is_none() {
                self.embedding.kind = ProviderKind::Table;
            }
        }
        set(&mut self.chat.kind, &o.chat_kind);
        set_opt(&mut self.chat.endpoint, &o.chat_url);
        set_opt(&mut self.chat.model, &o.chat_model);
        set_opt(&mut self.chat.glossary_path, &o.glossary);
        set_opt(&mut self.chat.fix_table_path, &o.fix_table);
        set_opt(&mut self.cache, &o.cache);
        set(&mut self.theta, &o.theta);
        set(&mut self.dedup_threshold, &o.dedup_threshold);
        set(&mut self.batch_size, &o.batch_size);
        set(&mut self.max_iterations, &o.max_iterations);
        set(&mut self.seed, &o.seed);
        set_opt(&mut self.parallelism, &o.parallelism);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("threshold {} outside (0, 1]", self.theta));
        }
        if !(self.dedup_threshold > 0.0 && self.dedup_threshold <= 1.0) {
            return bad(format!("dedup threshold {} outside (0, 1]", self.dedup_threshold));
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max iterations must be at least 1".into());
        }
        if self.parallelism == Some(0) {
            return bad("parallelism must be at least 1".into());
        }
        Ok(())
    }

    /// defaults <- config file <- environment <- flags.
    ///
    /// The config file is `explicit` when given, otherwise
    /// `layman-eval.json` in `cwd` if it exists.
    pub fn resolve(
        explicit: Option<&Path>,
        cwd: &Path,
        env: &dyn Fn(&str) -> Option<String>,
        overrides: &Overrides,
    ) -> Result<Self, CliError> {
        let path = match explicit {
            Some(p) => Some(if p.is_relative() { cwd.join(p) } else { p.to_path_buf() }),
            None => Some(cwd.join(CONFIG_FILE_NAME)).filter(|p| p.is_file()),
        };
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
                let base = p.parent().unwrap_or(cwd);
                RunConfig::from_json(&text, base).map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.apply_env(env);
        cfg.apply_overrides(overrides);
        rebase(cwd, &mut cfg.cache);
        rebase(cwd, &mut cfg.embedding.table_path);
        rebase(cwd, &mut cfg.chat.glossary_path);
        rebase(cwd, &mut cfg.chat.fix_table_path);
        cfg.validate()?;
        Ok(cfg)
    }
}
