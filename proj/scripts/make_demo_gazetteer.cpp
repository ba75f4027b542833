// One-off generator for data/demo/gazetteer.jsonl. Build after the library:
//   g++ -std=c++20 -O2 -I include -I vendor -I build/generated \
//       scripts/make_demo_gazetteer.cpp build/src/libnecorr_core.a \
//       -o /tmp/make_demo_gazetteer -fopenmp -lpthread
//   /tmp/make_demo_gazetteer
#include "necorr/corpus.hpp"
#include "necorr/ne_index.hpp"

int main() {
  auto entries = necorr::synth_gazetteer(300, 42);
  necorr::write_gazetteer("data/demo/gazetteer.jsonl", entries);
  return 0;
}
