#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use ivalue_service::{Config, Server};
use reqwest::{Client, StatusCode};
use serde_json::Value;
use tokio::task::JoinHandle;

pub struct TestServer {
    pub base: String,
    pub log: PathBuf,
    client: Client,
    task: JoinHandle<()>,
}

pub struct Reply {
    pub status: StatusCode,
    pub etag: Option<String>,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }

    pub fn payload(&self) -> Value {
        self.json()["payload"].clone()
    }

    pub fn revision(&self) -> u64 {
        self.etag.as_deref().expect("ETag").trim_matches('"').parse().unwrap()
    }

    pub fn error_name(&self) -> String {
        self.json()["error_name"].as_str().unwrap_or_default().to_owned()
    }
}

impl TestServer {
    pub async fn start(log: &Path) -> TestServer {
        let config = Config {
            addr: SocketAddr::from(([127, 0, 0, 1], 0)),
            log: log.to_path_buf(),
        };
        let server = Server::bind(&config).await.unwrap();
        let base = format!("http://{}", server.local_addr());
        let task = tokio::spawn(async move {
            server.run_until(std::future::pending()).await.unwrap();
        });
        TestServer {
            base,
            log: log.to_path_buf(),
            client: Client::new(),
            task,
        }
    }

    /// Stops the server abruptly, without any shutdown handling.
    pub async fn kill(self) {
        self.task.abort();
        let _ = self.task.await;
    }

    pub async fn send(&self, method: &str, path: &str, revision: Option<u64>, body: Option<&str>) -> Reply {
        let method = reqwest::Method::from_bytes(method.as_bytes()).unwrap();
        let mut req = self.client.request(method, format!("{}{path}", self.base));
        if let Some(rev) = revision {
            req = req.header("If-Match", format!("\"{rev}\""));
        }
        if let Some(body) = body {
            req = req.header("Content-Type", "application/json").body(body.to_owned());
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        let etag = resp
            .headers()
            .get("etag")
            .map(|v| v.to_str().unwrap().to_owned());
        let content_type = resp.headers().get("content-type").map(|v| v.to_str().unwrap().to_owned());
        let text = resp.text().await.unwrap();
        assert_eq!(content_type.as_deref(), Some("application/json"), "{status} {text}");
        Reply { status, etag, text }
    }

    pub async fn create(&self, objects: &[&str]) -> Reply {
        let body = serde_json::json!({ "objects": objects }).to_string();
        self.send("POST", "/sessions", None, Some(&body)).await
    }

    pub async fn put_cards(&self, id: &str, slot: usize, rev: u64, cards: (f64, f64)) -> Reply {
        let body = format!("[{},{}]", cards.0, cards.1);
        self.send("PUT", &format!("/sessions/{id}/cards/{slot}"), Some(rev), Some(&body))
            .await
    }

    /// Creates a four-object session and enters `cards`; returns id and revision.
    pub async fn session_with_cards(&self, cards: &[(f64, f64)]) -> (String, u64) {
        let r = self.create(&["l1", "l2", "l3", "l4"]).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
        let id = r.payload()["session_id"].as_str().unwrap().to_owned();
        let mut rev = r.revision();
        for (slot, &c) in cards.iter().enumerate() {
            let r = self.put_cards(&id, slot, rev, c).await;
            assert_eq!(r.status, StatusCode::OK, "{}", r.text);
            rev = r.revision();
        }
        (id, rev)
    }
}

pub fn interval(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

pub fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
}
