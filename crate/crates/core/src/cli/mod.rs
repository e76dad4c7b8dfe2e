//! Command-line front end and REPL.
//!
//! Exit statuses: 0 success, 1 property violation, 2 usage error,
//! 3 undecided within bounds.

pub mod cache;
pub mod config;

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{GroupError, Result};
use crate::levels::Conjugacy;
use crate::props::{self, LadderFormula, PropertyReport, SampleSpec};
use crate::text::parse_word;
use crate::tower::{Element, Tower};
use crate::word::Word;

pub use cache::CacheStatus;
pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "csatower",
    version,
    about = "Towers of CSA-groups: word problems, roots and property checks"
)]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stage: Option<u32>,
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Rep cache file; overrides the config's `cache` key.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Print the reduced form of a word.
    Nf { word: String },
    /// Decide equality of two words.
    Eq { a: String, b: String },
    /// Find x with x^-1 g x = h.
    Conj { g: String, h: String },
    /// An n-th root (`--n`, default 2) in the union of the tower.
    Root { word: String },
    /// Conjugacy class reps of a stage.
    Reps,
    /// Generators of a stage with their defining relations.
    Letters,
    /// Run a property suite.
    Props {
        #[arg(value_enum)]
        suite: Suite,
        /// Formula for the promotion suite.
        #[arg(default_value = "x y = y x")]
        formula: String,
    },
    /// Largest ladder of a quantifier-free formula on a ball.
    Ladder { formula: String },
    /// Interactive loop over the same commands.
    Repl,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Malnormality,
    Centralizers,
    Torsion,
    Divisibility,
    Promotion,
    /// Malnormality and centralizers.
    Csa,
    All,
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

impl Outcome {
    fn ok(text: impl Into<String>) -> Outcome {
        Outcome {
            text: text.into(),
            status: EXIT_OK,
        }
    }
}

pub fn exit_code(e: &GroupError) -> i32 {
    match e {
        GroupError::Undecided(_) => EXIT_UNDECIDED,
        _ => EXIT_USAGE,
    }
}

/// Per-command flags.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub stage: Option<u32>,
    pub radius: Option<usize>,
    pub count: Option<usize>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

impl From<&Cli> for Flags {
    fn from(c: &Cli) -> Flags {
        Flags {
            stage: c.stage,
            radius: c.radius,
            count: c.count,
            n: c.n,
            seed: c.seed,
        }
    }
}

/// One tower with its configuration and cache.
pub struct Session {
    pub config: Config,
    pub tower: Tower,
    fingerprint: String,
    saved: usize,
    /// False when the cache file belongs to another spec.
    writable: bool,
}

fn rep_total(tower: &Tower) -> usize {
    tower.materialized_reps().iter().map(|(_, r)| r.len()).sum()
}

impl Session {
    /// Build the tower and adopt the cache if one is configured. Warnings go
    /// to `err`.
    pub fn new(config: Config, err: &mut dyn Write) -> Result<Session> {
        let tower = Tower::new(config.spec.clone())?;
        let fingerprint = config.fingerprint();
        let mut s = Session {
            config,
            tower,
            fingerprint,
            saved: 0,
            writable: true,
        };
        if let Some(path) = s.config.cache.clone() {
            match cache::load(&path, &s.tower, &s.fingerprint)? {
                CacheStatus::Ignored { found } => {
                    let _ = writeln!(
                        err,
                        "warning: cache {} has fingerprint {} (expected {}); ignored",
                        path.display(),
                        found,
                        s.fingerprint
                    );
                    s.writable = false;
                }
                CacheStatus::Loaded(_) | CacheStatus::Missing => {}
            }
            s.saved = rep_total(&s.tower);
        }
        Ok(s)
    }

    /// Write the cache if reps were enumerated since the last save.
    pub fn save(&mut self) -> Result<()> {
        if let (Some(path), true) = (&self.config.cache, self.writable) {
            let total = rep_total(&self.tower);
            if total != self.saved || !path.exists() {
                cache::save(path, &self.tower, &self.fingerprint)?;
                self.saved = total;
            }
        }
        Ok(())
    }

    fn word(&self, text: &str) -> Result<Word> {
        parse_word(text)
    }

    /// Element at `--stage`, or at the least stage containing its letters.
    fn element(&self, text: &str, flags: &Flags) -> Result<Element> {
        let w = self.word(text)?;
        let stage = flags.stage.unwrap_or_else(|| w.max_stage().max(1));
        self.tower.element(stage, w)
    }

    fn pair(&self, a: &str, b: &str, flags: &Flags) -> Result<(Element, Element)> {
        let (a, b) = (self.word(a)?, self.word(b)?);
        let stage = flags.stage.unwrap_or_else(|| a.max_stage().max(b.max_stage()).max(1));
        Ok((self.tower.element(stage, a)?, self.tower.element(stage, b)?))
    }

    pub fn execute(&mut self, cmd: &Command, flags: &Flags) -> Result<Outcome> {
        match cmd {
            Command::Nf { word } => {
                let e = self.element(word, flags)?;
                Ok(Outcome::ok(self.tower.normal_form(&e)?.to_string()))
            }
            Command::Eq { a, b } => {
                let (a, b) = self.pair(a, b, flags)?;
                Ok(Outcome::ok(self.tower.are_equal(&a, &b)?.to_string()))
            }
            Command::Conj { g, h } => {
                let (g, h) = self.pair(g, h, flags)?;
                let level = self.tower.level(g.stage)?;
                Ok(match level.conjugate(&g.word, &h.word)? {
                    Conjugacy::Conjugate(x) => Outcome::ok(x.to_string()),
                    Conjugacy::NotConjugate => Outcome::ok("none"),
                    Conjugacy::Undecided(why) => Outcome {
                        text: format!("undecided\n# {}", why),
                        status: EXIT_UNDECIDED,
                    },
                })
            }
            Command::Root { word } => {
                let n = flags.n.unwrap_or(2);
                let e = self.element(word, flags)?;
                let h = self.tower.nth_root_union(&e, n)?;
                let shown = if h.word.syllable_count() > 1 {
                    format!("({})^{}", h, n)
                } else {
                    format!("{}^{}", h, n)
                };
                Ok(Outcome::ok(format!(
                    "{}\n# stage {}\nverified: {} = {}",
                    h, h.stage, shown, e
                )))
            }
            Command::Reps => {
                let stage = flags.stage.unwrap_or(1);
                let reps = self.tower.class_reps(stage, flags.count.unwrap_or(4))?;
                let lines: Vec<String> = reps.iter().map(|r| r.word.to_string()).collect();
                Ok(Outcome::ok(lines.join("\n")))
            }
            Command::Letters => {
                let stage = flags.stage.unwrap_or(1);
                if stage > 1 {
                    // stable letters are listed for materialized reps below
                    let count = flags.count.unwrap_or(4);
                    for s in 1..stage {
                        self.tower.class_reps(s, count)?;
                    }
                }
                let lines: Vec<String> = self.tower.stage_letters(stage)?.iter().map(|l| l.to_string()).collect();
                Ok(Outcome::ok(lines.join("\n")))
            }
            Command::Props { suite, formula } => self.props(*suite, formula, flags),
            Command::Ladder { formula } => {
                let f = LadderFormula::parse(formula)?;
                let sample = self.sample(flags);
                let r = props::ladder_search(&self.tower, &f, &sample, flags.n.unwrap_or(4) as usize)?;
                Ok(Outcome::ok(r.to_string()))
            }
            Command::Repl => Err(GroupError::Usage("already in the REPL".into())),
        }
    }

    fn sample(&self, flags: &Flags) -> SampleSpec {
        let mut s = SampleSpec::ball(flags.stage.unwrap_or(1), flags.radius.unwrap_or(self.config.radius))
            .with_size(flags.count.unwrap_or(self.config.sample_size));
        if let Some(seed) = flags.seed.or((self.config.seed != 0).then_some(self.config.seed)) {
            s = s.with_seed(seed);
        }
        s
    }

    fn props(&mut self, suite: Suite, formula: &str, flags: &Flags) -> Result<Outcome> {
        let t = &self.tower;
        let radius = flags.radius.unwrap_or(self.config.radius);
        let exp = self.config.exp_radius;
        let stages: Vec<u32> = match flags.stage {
            Some(s) => vec![s],
            None => vec![1, 2],
        };
        let run = |s: Suite| {
            matches!(suite, Suite::All)
                || s == suite
                || (suite == Suite::Csa && matches!(s, Suite::Malnormality | Suite::Centralizers))
        };
        let mut reports: Vec<PropertyReport> = Vec::new();
        if run(Suite::Malnormality) {
            for &k in &stages {
                for rep in t.class_reps(k, 2)? {
                    reports.push(props::check_malnormality_at(t, k, &rep.word, radius, exp)?);
                }
            }
        }
        if run(Suite::Centralizers) {
            for &k in &stages {
                reports.push(props::check_centralizers_at(t, k, radius)?);
            }
        }
        if run(Suite::Torsion) {
            for &k in &stages {
                reports.push(props::check_torsion_free_at(t, k, radius, flags.n.unwrap_or(6))?);
            }
        }
        if run(Suite::Divisibility) {
            let ns: Vec<u64> = (2..=flags.n.unwrap_or(4)).collect();
            let sample = SampleSpec::ball(stages[0], radius).with_size(flags.count.unwrap_or(20));
            reports.push(props::check_divisibility(t, &sample, &ns)?);
        }
        if run(Suite::Promotion) {
            let f = LadderFormula::parse(formula)?;
            let sample = self.sample(flags);
            let top: Vec<u32> = (sample.stage..=sample.stage + 2).collect();
            reports.push(props::check_promotion_invariance(t, &f, &sample, &top)?);
        }
        let failed = reports.iter().any(|r| !r.passed());
        let lines: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
        Ok(Outcome {
            text: lines.join("\n"),
            status: if failed { EXIT_VIOLATION } else { EXIT_OK },
        })
    }
}

fn config_for(cli_config: Option<&PathBuf>, cache: Option<&PathBuf>) -> Result<Config> {
    let mut c = match cli_config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(p) = cache {
        c.cache = Some(p.clone());
    }
    Ok(c)
}

fn finish(r: Result<Outcome>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match r {
        Ok(o) => {
            if !o.text.is_empty() {
                let _ = writeln!(out, "{}", o.text);
            }
            o.status
        }
        Err(e) => {
            if e.is_undecided() {
                let _ = writeln!(out, "undecided");
            }
            let _ = writeln!(err, "error: {}", e);
            exit_code(&e)
        }
    }
}

/// Run one invocation. `args` excludes the program name.
pub fn run<I, S>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("csatower")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let session = config_for(cli.config.as_ref(), cli.cache.as_ref()).and_then(|c| {
        let mut c = c;
        if let Some(seed) = cli.seed {
            c.seed = seed;
        }
        Session::new(c, err)
    });
    let mut session = match session {
        Ok(s) => s,
        Err(e) => return finish(Err(e), out, err),
    };
    let code = match &cli.command {
        Command::Repl => repl(&mut session, input, out, err),
        cmd => {
            let r = session.execute(cmd, &Flags::from(&cli));
            finish(r, out, err)
        }
    };
    if let Err(e) = session.save() {
        let _ = writeln!(err, "error: {}", e);
        return code.max(EXIT_USAGE);
    }
    code
}

const REPL_HELP: &str = "commands: nf, eq, conj, root, reps, letters, props, ladder (flags as on the command line)
  rebuild [<config>]   replace the tower
  save                 write the rep cache
  config               print the active configuration
  help, quit";

/// Read-eval-print loop. Returns the status of the last command.
pub fn repl(session: &mut Session, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut last = EXIT_OK;
    let mut line = String::new();
    loop {
        let _ = write!(out, "csatower> ");
        let _ = out.flush();
        line.clear();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        let Some(words) = shlex::split(line.trim()) else {
            let _ = writeln!(err, "error: unbalanced quotes");
            last = EXIT_USAGE;
            continue;
        };
        match words.first().map(String::as_str) {
            None => continue,
            Some("quit" | "exit") => break,
            Some("help") => {
                let _ = writeln!(out, "{}", REPL_HELP);
                continue;
            }
            Some("config") => {
                let _ = writeln!(out, "{}fingerprint = {}", session.config.to_text(), session.fingerprint);
                continue;
            }
            Some("save") => {
                last = finish(session.save().map(|_| Outcome::ok("saved")), out, err);
                continue;
            }
            Some("rebuild") => {
                let path = words.get(1).map(PathBuf::from);
                let cache = session.config.cache.clone();
                let rebuilt = session
                    .save()
                    .and_then(|_| config_for(path.as_ref(), cache.as_ref()))
                    .and_then(|c| Session::new(c, err));
                last = match rebuilt {
                    Ok(s) => {
                        *session = s;
                        finish(Ok(Outcome::ok("rebuilt")), out, err)
                    }
                    Err(e) => finish(Err(e), out, err),
                };
                continue;
            }
            _ => {}
        }
        let argv = std::iter::once("csatower".to_string()).chain(words);
        let cli = match Cli::try_parse_from(argv) {
            Ok(c) => c,
            Err(e) => {
                let _ = write!(err, "{}", e.render());
                last = EXIT_USAGE;
                continue;
            }
        };
        if cli.config.is_some() || cli.cache.is_some() {
            let _ = writeln!(err, "error: one tower per session; use `rebuild <config>`");
            last = EXIT_USAGE;
            continue;
        }
        last = finish(session.execute(&cli.command, &Flags::from(&cli)), out, err);
    }
    last
}
