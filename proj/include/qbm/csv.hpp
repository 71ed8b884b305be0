// csv.hpp: manifest headers and the tabular outputs of the CLI
//
// Every file starts with '#'-prefixed "key = value" lines recording the full
// configuration and the resolved switches, followed by one header row.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qbm/config.hpp"
#include "qbm/simulation.hpp"

namespace qbm {

using ManifestExtras = std::vector<std::pair<std::string, std::string>>;

void write_manifest(std::ostream& out, const RunConfig& config, const Switches& switches,
                    const ManifestExtras& extras = {});

// t,det,det_identity,discrepancy,mask
void write_witness_csv(std::ostream& out, const WitnessSeries& w);

// t, then analytic and oracle values of q_a,p_a,var_q,var_p,cov_qp
void write_oracle_csv(std::ostream& out, const OracleComparison& c);

// s,gamma,t_end,ratio_p2_0_05,ratio_p2_0_1,ratio_qp_05_1,drift
void write_table1_csv(std::ostream& out, const Table1Report& r);

// frequency_convention,noise_convention,dissipation_sign,discrepancy,selected
void write_calibration_csv(std::ostream& out, const CalibrationReport& r);

// File name fragment for a mu value, e.g. "mu0.5".
std::string mu_tag(double mu);

}  // namespace qbm
