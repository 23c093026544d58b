//! Network topology: node inventory, the link set and access-point status.
//!
//! Links are laid out in a fixed index order so that routes can be expressed
//! as plain link ids:
//!
//! | range                         | role                      |
//! |-------------------------------|---------------------------|
//! | `0`                           | core to application server |
//! | `1 ..= B`                     | core to sub-network server |
//! | next `L`                      | sub-network server to gateway |
//! | next `S`                      | core to access point       |
//! | next `E`                      | user to access tier        |

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

pub type LinkId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    AppServerCore,
    CoreServer,
    SubNetworkServer,
    Gateway,
    AccessPoint,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    /// Index within its kind.
    pub index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkRole {
    CoreAppServer,
    CoreSubServer,
    SubServerGateway,
    CoreAccessPoint,
    UserAccess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub a: Node,
    pub b: Node,
    pub role: LinkRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub ap_alive: Vec<bool>,
    n_servers: u32,
    n_gateways: u32,
    n_aps: u32,
    n_users: u32,
}

/// Builds the topology for a validated configuration. All APs start alive.
pub fn build_topology(config: &ScenarioConfig) -> Topology {
    let (b, l, s, e) = (config.n_servers, config.n_gateways, config.n_aps, config.n_users);
    let mut nodes = Vec::with_capacity((2 + config.n_core + b + l + s + e) as usize);
    nodes.push(Node { kind: NodeKind::AppServerCore, index: 0 });
    for i in 0..config.n_core {
        nodes.push(Node { kind: NodeKind::CoreServer, index: i });
    }
    let push_all = |nodes: &mut Vec<Node>, kind, n| {
        for index in 0..n {
            nodes.push(Node { kind, index });
        }
    };
    push_all(&mut nodes, NodeKind::SubNetworkServer, b);
    push_all(&mut nodes, NodeKind::Gateway, l);
    push_all(&mut nodes, NodeKind::AccessPoint, s);
    push_all(&mut nodes, NodeKind::User, e);

    let core = Node { kind: NodeKind::CoreServer, index: 0 };
    let mut links = Vec::with_capacity((1 + b + l + s + e) as usize);
    links.push(Link {
        a: core,
        b: Node { kind: NodeKind::AppServerCore, index: 0 },
        role: LinkRole::CoreAppServer,
    });
    for i in 0..b {
        links.push(Link {
            a: core,
            b: Node { kind: NodeKind::SubNetworkServer, index: i },
            role: LinkRole::CoreSubServer,
        });
    }
    for g in 0..l {
        links.push(Link {
            a: Node { kind: NodeKind::SubNetworkServer, index: server_of_gateway(g, b, l) },
            b: Node { kind: NodeKind::Gateway, index: g },
            role: LinkRole::SubServerGateway,
        });
    }
    for i in 0..s {
        links.push(Link {
            a: core,
            b: Node { kind: NodeKind::AccessPoint, index: i },
            role: LinkRole::CoreAccessPoint,
        });
    }
    for u in 0..e {
        links.push(Link {
            a: Node { kind: NodeKind::User, index: u },
            b: Node { kind: NodeKind::Gateway, index: u % l },
            role: LinkRole::UserAccess,
        });
    }

    Topology {
        nodes,
        links,
        ap_alive: vec![true; s as usize],
        n_servers: b,
        n_gateways: l,
        n_aps: s,
        n_users: e,
    }
}

/// Gateways are split into contiguous blocks, one block per server.
fn server_of_gateway(g: u32, n_servers: u32, n_gateways: u32) -> u32 {
    ((u64::from(g) * u64::from(n_servers)) / u64::from(n_gateways)) as u32
}

impl Topology {
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn n_servers(&self) -> u32 {
        self.n_servers
    }

    pub fn n_aps(&self) -> u32 {
        self.n_aps
    }

    pub fn n_users(&self) -> u32 {
        self.n_users
    }

    pub fn n_gateways(&self) -> u32 {
        self.n_gateways
    }

    pub fn core_app_link(&self) -> LinkId {
        0
    }

    pub fn core_server_link(&self, server: u32) -> LinkId {
        1 + server
    }

    pub fn gateway_link(&self, gateway: u32) -> LinkId {
        1 + self.n_servers + gateway
    }

    pub fn ap_link(&self, ap: u32) -> LinkId {
        1 + self.n_servers + self.n_gateways + ap
    }

    pub fn user_link(&self, user: u32) -> LinkId {
        1 + self.n_servers + self.n_gateways + self.n_aps + user
    }

    pub fn server_of_gateway(&self, gateway: u32) -> u32 {
        server_of_gateway(gateway, self.n_servers, self.n_gateways)
    }

    /// First gateway of a server's block.
    pub fn block_start(&self, server: u32) -> u32 {
        let (b, l) = (u64::from(self.n_servers), u64::from(self.n_gateways));
        (u64::from(server) * l).div_ceil(b) as u32
    }

    pub fn block_len(&self, server: u32) -> u32 {
        let end = if server + 1 >= self.n_servers {
            self.n_gateways
        } else {
            self.block_start(server + 1)
        };
        end - self.block_start(server)
    }

    pub fn gateway_of_user(&self, user: u32) -> u32 {
        user % self.n_gateways
    }

    pub fn ap_of_user(&self, user: u32) -> u32 {
        user % self.n_aps
    }

    /// The lowest-numbered user attached to a gateway.
    pub fn user_on_gateway(&self, gateway: u32) -> u32 {
        if gateway < self.n_users {
            gateway
        } else {
            gateway % self.n_users
        }
    }

    pub fn ap_is_alive(&self, ap: u32) -> bool {
        self.ap_alive[ap as usize]
    }

    pub fn alive_ap_count(&self) -> usize {
        self.ap_alive.iter().filter(|a| **a).count()
    }

    /// Marks the first `count` APs (by id) as failed.
    pub fn fail_first_aps(&mut self, count: u32) {
        for alive in self.ap_alive.iter_mut().take(count as usize) {
            *alive = false;
        }
    }

    /// Route of a LoRaWAN application from `user` hosted on `server`.
    pub fn lora_route(&self, user: u32, server: u32) -> Vec<LinkId> {
        let gw = self.gateway_of_user(user);
        let mut route = vec![self.user_link(user), self.gateway_link(gw)];
        let home = self.server_of_gateway(gw);
        route.push(self.core_server_link(home));
        if home != server {
            route.push(self.core_server_link(server));
        }
        route.push(self.core_app_link());
        route
    }

    /// Route of a PSC application carried by the user's access point.
    pub fn ap_route(&self, user: u32) -> Vec<LinkId> {
        vec![
            self.user_link(user),
            self.ap_link(self.ap_of_user(user)),
            self.core_app_link(),
        ]
    }
}
