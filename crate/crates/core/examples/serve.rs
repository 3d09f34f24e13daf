//! Start the HTTP service on a local port.
//!
//! Try it with:
//! curl -X POST --data-binary @fixtures/clean/dataset.nt -H 'content-type: application/n-triples' localhost:8088/datasets

use ldq::facade::service::serve;
use ldq::facade::store::Store;

#[tokio::main(flavor = "multi_thread")]
async fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("ldq-example-store");
    let addr = "127.0.0.1:8088".parse().expect("literal address");
    println!("store at {}, listening on {addr}", dir.display());
    serve(addr, Store::open(dir)?).await
}
