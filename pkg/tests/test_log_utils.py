import logging

from panofourier.utils.log_utils import RUN_LOG_NAME, run_log, setup_logger


def test_setup_logger_keeps_one_handler_per_file(tmp_path, monkeypatch):
    monkeypatch.setenv("PANOFOURIER_LOG_DIR", str(tmp_path / "logs"))
    logger = setup_logger("panofourier_test_logger", "test.log")
    setup_logger("panofourier_test_logger", "test.log")
    handlers = [h for h in logger.handlers if isinstance(h, logging.FileHandler)]
    try:
        assert len(handlers) == 1
        logger.info("first record")
        handlers[0].flush()
        assert "first record" in (tmp_path / "logs" / "test.log").read_text()
    finally:
        for handler in handlers:
            logger.removeHandler(handler)
            handler.close()


def test_run_log_only_records_while_active(tmp_path):
    logger = logging.getLogger("general_logger")
    with run_log(tmp_path / "run") as path:
        logger.info("inside the run")
        logger.debug("below the run level")
    logger.info("after the run")
    assert path == tmp_path / "run" / RUN_LOG_NAME
    text = path.read_text()
    assert "inside the run" in text
    assert "below the run level" not in text
    assert "after the run" not in text
