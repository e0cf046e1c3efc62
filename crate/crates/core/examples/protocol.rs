//! Runs the server/user loop on a small tree and prints the learned policy.

use dpefb::game_tree::{parse_environments, play};
use dpefb::rng::stream;
use dpefb::server::compute_schedule;
use dpefb::user::LaplaceMechanism;
use dpefb::{Game, ServerState};

const TREE: &str = "\
0 I -
1 A 0
2 A 0
3 L 1 0.3
4 L 1 0.7
5 I 2
6 A 5
7 A 5
8 L 6 0.0
9 L 7 1.0
";

fn main() -> dpefb::Result<()> {
    let game = Game::parse(TREE)?;
    let envs = parse_environments(&game.tree, "1=3 2=5 6=8 7=9\n1=4 2=5 6=8 7=9\n")?;
    let (horizon, epsilon) = (5000, 0.5);

    let schedule = compute_schedule(&game, horizon, epsilon, false)?;
    let mut server = ServerState::new(game.clone(), schedule);
    let mechanism = LaplaceMechanism::for_epsilon(epsilon);
    let mut server_rng = stream(1, 0);
    let mut user_rng = stream(2, 0);

    let mut total = 0.0;
    for t in 0..horizon {
        let sigma = server.sample_strategy(&mut server_rng);
        let outcome = play(&game.tree, &sigma, &envs[t as usize % envs.len()])?;
        total += outcome.loss;
        let report = mechanism.report(&game.tree, &sigma, &outcome, t, &mut user_rng)?;
        server.update_policy(&sigma, &report)?;
    }

    println!("mean loss {:.3}", total / horizon as f64);
    for &a in game.tree.actions() {
        println!("pi({a}) = {:.3}", server.probability(a));
    }
    Ok(())
}
