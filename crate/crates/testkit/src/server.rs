//! Runs the service binary as a child process.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::process::{Child, ChildStdout, Command, Stdio};

/// A running service. Killed on drop.
pub struct Server {
    child: Child,
    pub base_url: String,
    _stdout: BufReader<ChildStdout>,
}

impl Server {
    /// Starts `bin serve` on an ephemeral port and waits for the
    /// `listening on` line.
    pub fn start(bin: &Path, project: &Path) -> Result<Server, String> {
        Self::start_on(bin, project, "127.0.0.1:0")
    }

    pub fn start_on(bin: &Path, project: &Path, listen: &str) -> Result<Server, String> {
        let mut child = Command::new(bin)
            .arg("--project")
            .arg(project)
            .args(["serve", "--listen", listen])
            .env_remove("PREPWB_DATA_DIR")
            .env_remove("PREPWB_PROJECT")
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| format!("spawn {}: {e}", bin.display()))?;
        let mut stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut line = String::new();
        stdout.read_line(&mut line).map_err(|e| e.to_string())?;
        match line.trim().strip_prefix("listening on ") {
            Some(url) => Ok(Server {
                base_url: url.to_string(),
                child,
                _stdout: stdout,
            }),
            None => {
                let _ = child.wait();
                let mut err = String::new();
                if let Some(mut e) = child.stderr.take() {
                    let _ = e.read_to_string(&mut err);
                }
                Err(format!("service did not start: {}", err.trim()))
            }
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base_url)
    }

    /// SIGKILL, no shutdown handling.
    pub fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
