#pragma once

#include <filesystem>
#include <stdexcept>
#include <set>
#include <string>
#include <vector>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <moralframe/corpus/record_format.hpp>
#include <moralframe/ontology.hpp>
#include <moralframe/random.hpp>
#include <moralframe/situation.hpp>

namespace support {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(MORALFRAME_SOURCE_DIR) / "data" / name;
}

// Fresh empty directory under the system temp dir.
// A loopback port with nothing listening on it.
inline int unused_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  if (fd < 0 || ::bind(fd, reinterpret_cast<sockaddr*>(&addr), len) != 0 ||
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
    throw std::runtime_error("cannot reserve a loopback port");
  ::close(fd);
  return ntohs(addr.sin_port);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("moralframe-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline moralframe::Ontology make_ontology(const std::vector<std::string>& roles,
                                          const std::vector<std::pair<std::string, std::vector<std::string>>>& descriptions) {
  nlohmann::json doc{{"roles", nlohmann::json::array()}, {"descriptions", nlohmann::json::array()}};
  for (const auto& r : roles) doc["roles"].push_back({{"name", r}, {"parent", nullptr}});
  for (const auto& [name, rs] : descriptions) doc["descriptions"].push_back({{"name", name}, {"roles", rs}});
  return moralframe::ontology_from_json(doc);
}

// Up to max_desc descriptions over up to max_roles roles named R0, R1, ...
inline moralframe::Ontology random_ontology(moralframe::Rng& rng, int max_desc, int max_roles) {
  using namespace moralframe;
  const int n_roles = uniform_int(rng, 1, max_roles);
  const int n_desc = uniform_int(rng, 1, max_desc);
  std::vector<std::string> roles;
  for (int r = 0; r < n_roles; ++r) roles.push_back("R" + std::to_string(r));
  std::vector<std::pair<std::string, std::vector<std::string>>> descs;
  for (int d = 0; d < n_desc; ++d) {
    const int k = uniform_int(rng, 1, n_roles);
    std::vector<std::string> rs;
    for (std::size_t pos : sample_without_replacement(rng, roles.size(), static_cast<std::size_t>(k))) rs.push_back(roles[pos]);
    descs.push_back({"D" + std::to_string(d), rs});
  }
  return make_ontology(roles, descs);
}

inline moralframe::Situation random_situation(moralframe::Rng& rng, const moralframe::Ontology& o, int max_fragments = 8) {
  using namespace moralframe;
  Situation s;
  s.id = "s";
  s.sentence = "a sentence.";
  const int k = uniform_int(rng, 1, max_fragments);
  for (int i = 0; i < k; ++i)
    s.fragments.push_back({"f" + std::to_string(i), o.roles()[uniform_index(rng, o.role_count())].name});
  return s;
}

// n records in the structured format: `hallucinated` of them name an unknown
// role, `malformed` of them break the format in one of four ways, the rest are
// valid. Positions of the bad records are shuffled.
inline std::string constructed_stream(moralframe::Rng& rng, const moralframe::Ontology& o, std::size_t n,
                                      std::size_t hallucinated, std::size_t malformed) {
  using namespace moralframe;
  std::vector<int> kind(n, 0);
  for (std::size_t i = 0; i < hallucinated; ++i) kind[i] = 1;
  for (std::size_t i = 0; i < malformed; ++i) kind[hallucinated + i] = 2;
  shuffle(kind, rng);
  std::string out = "Sure, here are the sentences you asked for.\n\n";
  for (std::size_t i = 0; i < n; ++i) {
    Situation s = random_situation(rng, o, 4);
    s.sentence = "Sentence number " + std::to_string(i) + " happened.";
    if (kind[i] == 1) s.fragments.push_back({"a starship", "Starship"});
    std::string rec;
    moralframe::corpus::append_record(rec, s.sentence, s.fragments);
    if (kind[i] == 2) {
      switch (i % 4) {
      case 0: rec.replace(rec.find(" happened."), 10, " happened"); break;  // no full stop
      case 1: rec.replace(rec.find("ROLES:\n"), 7, ""); break;             // no ROLES header
      case 2: rec = "SENTENCE: " + s.sentence + "\nROLES:\n"; break;        // no fragments
      case 3: rec.replace(rec.find(" :: "), 4, " -- "); break;              // broken fragment line
      }
    }
    out += rec;
    out += '\n';
  }
  return out;
}

} // namespace support
