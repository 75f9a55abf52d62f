#pragma once

#include <iosfwd>
#include <vector>

#include "fighter/kill_sequence.hpp"

namespace fighter {

// Fixed-step numerical solution of the same recursion, built without the
// exp-poly machinery: N*(r,.) is integrated from dN*/dt = N(r,t) - N*(r,t)
// with classical RK4, and N(n,.), K(n,.) come from a direct maximization at
// every node.
//
// Switch times of each N(n,.) are located between nodes and inserted as
// extra integration nodes, so no step straddles a kink. Off-node values of
// N*(s,.) are cubic (4-node Lagrange) interpolants taken from one side of
// every switch time. The public arrays only expose the uniform nodes.
struct GridTable {
    double h = 0.0;
    double t_max = 0.0;
    int n_max = 0;
    std::vector<double> t;                     // uniform nodes i*h
    std::vector<std::vector<double>> N;        // [n][i], n = 0..n_max
    std::vector<std::vector<double>> N_star;   // [r][i], r = 0..n_max-1
    std::vector<std::vector<int>> K;           // [n][i], n = 1..n_max (K[0] empty)
    std::vector<double> switch_times;          // every located switch, all levels
};

GridTable solve_grid(const KillSequence& seq, int n_max, double t_max, double h);

// Columns t,n,N,N_star,K; N_star is blank for n = n_max.
void write_grid_csv(std::ostream& os, const GridTable& g);

}  // namespace fighter
