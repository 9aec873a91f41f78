#include "test_support.hpp"

#include <atomic>
#include <unistd.h>

#include <json.hpp>

#include "insightgen/corpus.hpp"

namespace testutil {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = fs::temp_directory_path();
  path_ = base / ("insightgen-test-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::pair<std::string, std::string>> fixture_docs() {
  auto expand = [](const std::string& text, int reps) {
    std::string body;
    for (int i = 0; i < reps; ++i) {
      if (i > 0) body += ' ';
      body += text;
    }
    return body;
  };
  return {
      {"astronomy",
       expand("Telescopes gather light from distant objects. Spectral lines reveal "
              "what stars are made of. Red shift measures how fast galaxies recede. "
              "Dark matter shows itself only through gravity.",
              4)},
      {"baking",
       expand("Gluten forms when flour meets water and kneading. Yeast produces gas "
              "that leavens the dough. Steam in a hot oven sets a crisp crust. "
              "Resting relaxes the dough before shaping.",
              4)},
      {"cartography",
       expand("Projections trade shape fidelity against area fidelity. Contour lines "
              "join points of equal elevation. Scale bars relate paper distance to "
              "ground distance. Legends decode the symbols on the sheet.",
              4)},
      {"databases",
       expand("Indexes speed up reads at the cost of writes. Transactions group "
              "changes into one atomic unit. Query planners choose among access "
              "paths. Replication copies data across machines for safety.",
              4)},
      {"ecology",
       expand("Food webs trace energy from producers to predators. Keystone species "
              "hold communities together. Succession rebuilds habitats after "
              "disturbance. Nutrient cycles move matter through soil and water.",
              4)},
      {"forging",
       expand("Heat makes steel soft enough to move under the hammer. Quenching "
              "locks in a hard crystal structure. Tempering trades hardness for "
              "toughness. Flux keeps welds clean inside the fire.",
              4)},
      {"glaciers",
       expand("Ice flows downhill under its own weight. Moraines mark where glaciers "
              "once stood. Crevasses open where the ice stretches. Meltwater carves "
              "channels beneath the surface.",
              4)},
      {"harmony",
       expand("Chords stack intervals into single sonorities. Cadences give phrases "
              "a sense of arrival. Voice leading keeps lines smooth between chords. "
              "Modulation shifts the music into a new key.",
              4)},
      {"immunology",
       expand("Antibodies bind antigens with remarkable precision. Memory cells "
              "remember pathogens for decades. Vaccines rehearse the immune response "
              "safely. Inflammation recruits defenders to the site of injury.",
              4)},
      {"jurisprudence",
       expand("Precedent binds later courts to earlier reasoning. Statutes are read "
              "in light of their purpose. Burdens of proof allocate the risk of "
              "error. Appeals review law rather than fact.",
              4)},
  };
}

void write_fixture_collection(const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, body] : fixture_docs()) {
    insightgen::write_text_file(dir / (name + ".txt"), body + "\n");
  }
}

std::vector<insightgen::QARecord> fixture_qa(int n) {
  const std::vector<std::pair<std::string, std::string>> pool = {
      {"How do telescopes identify the composition of stars?",
       "Spectral lines in the gathered light act as fingerprints for each element, "
       "so astronomers match absorption patterns against laboratory spectra."},
      {"Why does bread dough rise?",
       "Yeast ferments sugars and releases gas, and the gluten network traps that "
       "gas so the dough expands while it rests."},
      {"What do contour lines on a map show?",
       "Each contour joins points of equal elevation, so their spacing reveals how "
       "steep the terrain is."},
      {"Why do database indexes slow down writes?",
       "Every insert or update must also maintain the index structures, so extra "
       "work is paid on each write in exchange for faster reads."},
      {"What is a keystone species?",
       "A species whose removal reshapes the whole community, far beyond its own "
       "abundance, because other species depend on it."},
      {"Why is steel quenched and then tempered?",
       "Quenching makes the metal very hard but brittle, and tempering gives back "
       "some toughness at a small cost in hardness."},
      {"How do moraines form?",
       "Glaciers bulldoze rock and soil as they advance, and the debris left at "
       "their edges when the ice retreats piles into ridges."},
      {"What makes a cadence feel conclusive?",
       "The harmony resolves onto the tonic after a dominant chord, which the ear "
       "hears as arrival at home."},
      {"How do vaccines create immunity?",
       "They present harmless antigens so memory cells form without disease, and "
       "those cells respond quickly on real infection."},
      {"What does precedent mean in law?",
       "Earlier decisions bind later courts facing the same question, which keeps "
       "the law predictable across cases."},
  };
  std::vector<insightgen::QARecord> records;
  for (int i = 0; i < n; ++i) {
    const auto& [q, a] = pool[static_cast<std::size_t>(i) % pool.size()];
    insightgen::QARecord qa;
    char id[8];
    std::snprintf(id, sizeof(id), "q%02d", i + 1);
    qa.qa_id = id;
    qa.collection_id = "fixture";
    const int round = i / static_cast<int>(pool.size());
    qa.question = round == 0 ? q : q + " (variant " + std::to_string(round) + ")";
    qa.answer = a;
    records.push_back(std::move(qa));
  }
  return records;
}

void write_qa_jsonl(const fs::path& path,
                    const std::vector<insightgen::QARecord>& records) {
  std::string out;
  for (const auto& qa : records) {
    nlohmann::json j;
    j["qa_id"] = qa.qa_id;
    j["collection_id"] = qa.collection_id;
    j["question"] = qa.question;
    j["answer"] = qa.answer;
    out += j.dump();
    out += '\n';
  }
  insightgen::write_text_file(path, out);
}

insightgen::Config mock_config(int chunk_budget) {
  insightgen::Config config;
  config.mock = true;
  config.params.chunk_budget = chunk_budget;
  config.context_budget = 600;
  config.parallelism = 2;
  return config;
}

}  // namespace testutil
