//! Flat `key = value` config files whose keys mirror the long CLI flags.
//!
//! ```text
//! # reward sweep defaults
//! w = 10
//! k = 5
//! cost-h = 2
//! ```
//!
//! Values from the file are spliced in front of the command line, so explicit
//! flags always win.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::CommandFactory;

use super::Cli;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigFile {
    pub entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value, got '{line}'", n + 1))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if key.is_empty() {
                return Err(format!("config line {}: empty key", n + 1));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    /// Flags this file contributes to `subcommand`. Keys that belong to some
    /// other subcommand are skipped; keys no subcommand knows are rejected.
    pub fn flags_for(&self, subcommand: &str) -> Result<Vec<OsString>, String> {
        let cmd = Cli::command();
        let Some(sub) = cmd.get_subcommands().find(|s| s.get_name() == subcommand) else {
            return Ok(Vec::new());
        };
        let known = |key: &str| {
            cmd.get_subcommands()
                .flat_map(|s| s.get_arguments())
                .any(|a| a.get_long() == Some(key))
        };

        let mut flags = Vec::new();
        for (key, value) in &self.entries {
            if key == "config" {
                return Err("config files cannot include other config files".into());
            }
            match sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) {
                Some(arg) if arg.get_action().takes_values() => {
                    flags.push(format!("--{key}").into());
                    flags.push(value.into());
                }
                Some(_) => match value.as_str() {
                    "true" | "yes" | "1" => flags.push(format!("--{key}").into()),
                    "false" | "no" | "0" => {}
                    other => return Err(format!("config key '{key}' expects true/false, got '{other}'")),
                },
                None if known(key) => {}
                None => return Err(format!("unknown config key '{key}'")),
            }
        }
        Ok(flags)
    }
}
