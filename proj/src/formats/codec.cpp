#include <cloudtrace/codec.hpp>
#include <cloudtrace/text.hpp>

#include <openssl/evp.h>

#include <memory>

namespace cloudtrace::codec {

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
    std::string compact;
    compact.reserve(text.size());
    for (char c : text)
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n') compact.push_back(c);
    if (compact.size() % 4 != 0) return std::nullopt;
    if (compact.empty()) return std::vector<std::uint8_t>{};

    auto padding = compact.find('=');
    if (padding != std::string::npos) {
        if (compact.size() - padding > 2) return std::nullopt;
        for (auto i = padding; i < compact.size(); ++i)
            if (compact[i] != '=') return std::nullopt;
    }

    std::vector<std::uint8_t> out(compact.size() / 4 * 3);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(compact.data()),
                            static_cast<int>(compact.size()));
    if (n < 0) return std::nullopt;
    // EVP_DecodeBlock counts padding as zero bytes
    std::size_t pad = padding == std::string::npos ? 0 : compact.size() - padding;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    return text::to_hex({digest, len});
}

}  // namespace cloudtrace::codec
