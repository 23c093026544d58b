//! Builds the default network, prints its link inventory and shows how
//! failing access points changes a user's route.

use lorawan_psc::{build_topology, ScenarioConfig};

fn main() {
    let cfg = ScenarioConfig::default();
    let mut topo = build_topology(&cfg);
    println!(
        "servers={} gateways={} aps={} users={} links={}",
        topo.n_servers(),
        topo.n_gateways(),
        topo.n_aps(),
        topo.n_users(),
        topo.link_count()
    );

    for server in 0..topo.n_servers() {
        println!("server {server}: gateways {}..{}", topo.block_start(server), topo.block_start(server) + topo.block_len(server));
    }

    let user = 42;
    let home = topo.server_of_gateway(topo.gateway_of_user(user));
    println!("user {user}: ap {} gateway {} home server {home}", topo.ap_of_user(user), topo.gateway_of_user(user));
    println!("  cellular route {:?}", topo.ap_route(user));
    println!("  lora route via its home server {:?}", topo.lora_route(user, home));
    println!("  lora route hosted on server 9 {:?}", topo.lora_route(user, 9));

    topo.fail_first_aps((cfg.n_aps as f64 * 0.5) as u32);
    println!("after failing half the APs: {} alive, ap {} alive = {}", topo.alive_ap_count(), topo.ap_of_user(user), topo.ap_is_alive(topo.ap_of_user(user)));
}
