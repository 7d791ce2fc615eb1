//! In-process HTTP endpoint fake used by the judge tests.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};
use tiny_http::{Header, Response, Server};

/// Canned completions body whose score tokens carry the given logprobs.
pub fn completions_reply(token_logprobs: &[f64]) -> Value {
    json!({
        "choices": [{
            "text": "echoed prompt",
            "logprobs": {"token_logprobs": token_logprobs}
        }]
    })
}

/// Canned chat body whose assistant message is `content`.
pub fn chat_reply(content: &str) -> Value {
    json!({
        "choices": [{
            "message": {"role": "assistant", "content": content}
        }]
    })
}

/// Tiny HTTP server running on an ephemeral local port. Each request is
/// handled on its own thread so client-side concurrency is observable; the
/// handler receives the arrival ordinal, path, and parsed JSON body.
pub struct StubServer {
    pub url: String,
    requests: Arc<AtomicUsize>,
    max_inflight: Arc<AtomicUsize>,
    last_authorization: Arc<Mutex<Option<String>>>,
}

impl StubServer {
    pub fn spawn(
        handler: impl Fn(usize, &str, Value) -> (u16, Value) + Send + Sync + 'static,
    ) -> StubServer {
        let server = Server::http("127.0.0.1:0").expect("bind an ephemeral port");
        let addr = server.server_addr().to_ip().expect("tcp listener");
        let requests = Arc::new(AtomicUsize::new(0));
        let inflight = Arc::new(AtomicUsize::new(0));
        let max_inflight = Arc::new(AtomicUsize::new(0));
        let last_authorization = Arc::new(Mutex::new(None));
        let handler = Arc::new(handler);

        let stub = StubServer {
            url: format!("http://{addr}"),
            requests: requests.clone(),
            max_inflight: max_inflight.clone(),
            last_authorization: last_authorization.clone(),
        };
        thread::spawn(move || {
            for mut request in server.incoming_requests() {
                let ordinal = requests.fetch_add(1, Ordering::SeqCst);
                let handler = handler.clone();
                let inflight = inflight.clone();
                let max_inflight = max_inflight.clone();
                let last_authorization = last_authorization.clone();
                thread::spawn(move || {
                    let now = inflight.fetch_add(1, Ordering::SeqCst) + 1;
                    max_inflight.fetch_max(now, Ordering::SeqCst);

                    let auth = request
                        .headers()
                        .iter()
                        .find(|h| h.field.equiv("Authorization"))
                        .map(|h| h.value.as_str().to_string());
                    if auth.is_some() {
                        *last_authorization.lock().unwrap() = auth;
                    }
                    let path = request.url().to_string();
                    let mut body = String::new();
                    let _ = request.as_reader().read_to_string(&mut body);
                    let parsed = serde_json::from_str(&body).unwrap_or(Value::Null);

                    let (status, reply) = handler(ordinal, &path, parsed);
                    let response = Response::from_string(reply.to_string())
                        .with_status_code(status)
                        .with_header(
                            Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..])
                                .expect("static header"),
                        );
                    let _ = request.respond(response);
                    inflight.fetch_sub(1, Ordering::SeqCst);
                });
            }
        });
        stub
    }

    /// Total requests received so far.
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    /// Highest number of simultaneously open requests observed.
    pub fn max_inflight_seen(&self) -> usize {
        self.max_inflight.load(Ordering::SeqCst)
    }

    pub fn last_authorization(&self) -> Option<String> {
        self.last_authorization.lock().unwrap().clone()
    }
}
