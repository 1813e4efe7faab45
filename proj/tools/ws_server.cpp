#include "ws_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace panto {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace ws = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, SchedulerConfig cfg) : stream_(std::move(socket)) { state_.scheduler = cfg; }

    void start() {
        stream_.text(true);
        stream_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (!ec) self->read();
        });
    }

private:
    void read() {
        buffer_.clear();
        stream_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, size_t) {
            if (ec) return;
            self->reply_ = handleLine(self->state_, beast::buffers_to_string(self->buffer_.data()));
            self->stream_.async_write(asio::buffer(self->reply_), [self](beast::error_code wec, size_t) {
                if (!wec) self->read();
            });
        });
    }

    ws::stream<tcp::socket> stream_;
    beast::flat_buffer buffer_;
    std::string reply_;
    SessionState state_;
};

}  // namespace

struct WsServer::Impl {
    asio::io_context ioc{1};
    tcp::acceptor acceptor;
    SchedulerConfig cfg;

    Impl(unsigned short port, SchedulerConfig c) : acceptor(ioc, {asio::ip::make_address("127.0.0.1"), port}), cfg(c) {}

    void accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<Connection>(std::move(socket), cfg)->start();
            accept();
        });
    }
};

WsServer::WsServer(unsigned short port, SchedulerConfig cfg) : impl_(std::make_unique<Impl>(port, cfg)) {}
WsServer::~WsServer() = default;

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::run() {
    impl_->accept();
    impl_->ioc.run();
}

void WsServer::stop() { impl_->ioc.stop(); }

}  // namespace panto
