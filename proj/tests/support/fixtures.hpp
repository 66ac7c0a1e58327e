#pragma once

#include "hyperprob/model.hpp"

#include <string>

inline std::string fixture(const std::string& name) { return std::string(HYPERPROB_FIXTURE_DIR) + "/" + name; }

inline hyperprob::Mdp m_coin() { return hyperprob::load_mdp(fixture("m_coin.mdpx")); }
inline hyperprob::Mdp d_half() { return hyperprob::load_mdp(fixture("d_half.mdpx")); }
