#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

namespace fixtures {

// The five published sample rows, in download order.
inline constexpr const char* kFig1Csv =
    "rank,model_name,link,downloads,likes,ReadMeLink,params_millions\n"
    "1,gpt2,https://huggingface.co/gpt2,13600000.0,1260.0,https://huggingface.co/gpt2/raw/main/README.md,NaN\n"
    "2,mpt-7b-instruct,https://huggingface.co/mosaicml/mpt-7b-instruct,3050000.0,418.0,"
    "https://huggingface.co/mosaicml/mpt-7b-instruct/raw/main/README.md,7000.0\n"
    "3,bloom-560m,https://huggingface.co/bigscience/bloom-560m,1520000.0,224.0,"
    "https://huggingface.co/bigscience/bloom-560m/raw/main/README.md,560.0\n"
    "4,distilgpt2,https://huggingface.co/distilgpt2,1140000.0,227.0,"
    "https://huggingface.co/distilgpt2/raw/main/README.md,NaN\n"
    "5,vicuna-7b-v1.1,https://huggingface.co/lmsys/vicuna-7b-v1.1,1020000.0,60.0,"
    "https://huggingface.co/lmsys/vicuna-7b-v1.1/raw/main/README.md,7000.0\n";

inline std::filesystem::path source_dir() { return CONSTELLATION_SOURCE_DIR; }

inline std::filesystem::path fixture_csv() { return source_dir() / "data" / "fixture_200.csv"; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("constellation-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
