//! In-process server and a small blocking JSON client.
#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;
use std::thread::JoinHandle;

use qalam_core::{Lexicon, ScoringConfig};
use qalam_service::http::router;
use qalam_service::{Engines, SessionService};
use qalam_store::Store;
use serde_json::Value;

pub struct TestServer {
    pub base: String,
    pub service: Option<Arc<SessionService>>,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

pub fn local_engines() -> Engines {
    Engines::local(Lexicon::seed(), ScoringConfig::default_config())
}

impl TestServer {
    pub fn start(dir: &Path, engines: Engines) -> TestServer {
        let service = SessionService::new(Store::open(dir).unwrap(), engines);
        service.seed_prompts().unwrap();
        let service = Arc::new(service);
        let app = router(service.clone());
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let (addr_tx, addr_rx) = std::sync::mpsc::channel();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
                addr_tx.send(listener.local_addr().unwrap()).unwrap();
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
                    .unwrap();
            });
        });
        let addr = addr_rx.recv().unwrap();
        TestServer { base: format!("http://{addr}"), service: Some(service), shutdown: Some(tx), thread: Some(thread) }
    }

    pub fn client(&self) -> Client {
        Client::new(&self.base)
    }

    pub fn stop(mut self) {
        self.halt();
    }

    fn halt(&mut self) {
        self.service = None;
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            t.join().unwrap();
        }
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.halt();
    }
}

#[derive(Clone)]
pub struct Client {
    base: String,
    agent: ureq::Agent,
}

impl Client {
    pub fn new(base: &str) -> Client {
        let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
        Client { base: base.to_string(), agent }
    }

    fn finish(resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> (u16, Value) {
        let mut resp = resp.expect("request failed");
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().unwrap();
        let value = if text.is_empty() { Value::Null } else { serde_json::from_str(&text).unwrap_or(Value::String(text)) };
        (status, value)
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        Self::finish(self.agent.get(format!("{}{path}", self.base)).call())
    }

    pub fn post(&self, path: &str, body: Value) -> (u16, Value) {
        Self::finish(self.agent.post(format!("{}{path}", self.base)).send_json(&body))
    }

    pub fn patch(&self, path: &str, body: Value) -> (u16, Value) {
        Self::finish(self.agent.patch(format!("{}{path}", self.base)).send_json(&body))
    }

    /// Creates a user and an essay on `prompt_id`, returning the essay id.
    pub fn new_essay(&self, prompt_id: &str) -> String {
        let (status, user) = self.post("/users", serde_json::json!({"native_language": "English"}));
        assert_eq!(status, 201, "{user}");
        let (status, essay) =
            self.post("/essays", serde_json::json!({"user_id": user["user_id"], "prompt_id": prompt_id}));
        assert_eq!(status, 201, "{essay}");
        essay["essay_id"].as_str().unwrap().to_string()
    }

    pub fn check(&self, essay_id: &str, text: &str) -> (u16, Value) {
        self.post(&format!("/essays/{essay_id}/check"), serde_json::json!({ "text": text }))
    }
}
