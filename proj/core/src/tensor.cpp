#include "avatarforge/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "avatarforge/json_io.hpp"

namespace avatarforge {

static_assert(std::endian::native == std::endian::little,
              "tensor interchange assumes a little-endian host");

void save_tensor(const Tensor& t, const std::string& path) {
  std::string payload(t.size() * sizeof(float), '\0');
  std::memcpy(payload.data(), t.data().data(), payload.size());
  write_file_atomic(path, payload);

  nlohmann::json sidecar = {{"dtype", "float32"}, {"shape", t.shape()}};
  write_file_atomic(path + ".json", sidecar.dump() + "\n");
}

Tensor load_tensor(const std::string& path) {
  std::ifstream sidecar_in(path + ".json", std::ios::binary);
  if (!sidecar_in) throw Error(Errc::IoFailure, "cannot open " + path + ".json");
  nlohmann::json sidecar;
  try {
    sidecar_in >> sidecar;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::MalformedRecord, path + ".json: " + e.what());
  }
  if (sidecar.value("dtype", std::string()) != "float32")
    throw Error(Errc::MalformedRecord, path + ".json: unsupported dtype");
  const auto shape = sidecar.at("shape").get<std::vector<std::int64_t>>();

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::vector<float> data(static_cast<std::size_t>(Tensor::element_count(shape)));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(float))
    throw Error(Errc::ShapeMismatch, path + ": payload shorter than sidecar shape");
  return Tensor(shape, std::move(data));
}

}  // namespace avatarforge
