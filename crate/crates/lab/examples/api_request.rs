//! Sends requests to the HTTP router without opening a socket.

use axum::body::Body;
use axum::http::Request;
use coupled_logistic_lab::api::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(req: Request<Body>) -> Value {
    let resp = router(AppState::default()).oneshot(req).await.expect("router is infallible");
    let status = resp.status();
    let bytes = resp.into_body().collect().await.expect("body").to_bytes();
    let body: Value = serde_json::from_slice(&bytes).expect("json body");
    println!("{status}");
    body
}

#[tokio::main]
async fn main() {
    let loci = call(Request::get("/api/loci?eps=0.2").body(Body::empty()).unwrap()).await;
    println!("loci: mu0 {} mu1 {} muPrime {}", loci["mu0"], loci["mu1"], loci["muPrime"]);

    let orbit = json!({"mu": 3.694, "epsilon": 0.01, "z0": [0.3, 0.6], "nMax": 5000, "maxSamples": 4});
    let req = Request::post("/api/orbit").header("content-type", "application/json").body(Body::from(orbit.to_string())).unwrap();
    let body = call(req).await;
    println!("orbit: {} samples {}", body["verdict"], body["samples"]);

    let bad = json!({"mu": 7.0, "epsilon": 0.25});
    let req = Request::post("/api/gamma").header("content-type", "application/json").body(Body::from(bad.to_string())).unwrap();
    println!("gamma: {}", call(req).await["error"]);
}
