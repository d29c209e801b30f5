#include "parchain/simnet/protocols.hpp"

#include <stdexcept>
#include <string>

namespace parchain::simnet {

NakamotoNode::Message NakamotoNode::seal(Candidate c, const HashValue& h) {
  if (!is_pow_valid(h, *params_)) throw std::logic_error("mining success with a hash that fails the PoW check");
  Message m{std::make_shared<const nakamoto::Block>(std::move(c)), h};
  auto r = receive(m);
  if (r.verdict != Verdict::accepted) {
    throw std::logic_error("self-processing of a mined block failed: " + std::string(to_string(r.reason)));
  }
  return m;
}

}  // namespace parchain::simnet
