import logging
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Optional

import requests

from src.config import get_settings

logger = logging.getLogger(__name__)


class Severity(Enum):
    """Notification severity levels."""
    INFO = ('INFO', '#3498db')  # Blue
    WARNING = ('WARNING', '#f1c40f')  # Yellow
    ERROR = ('ERROR', '#e74c3c')  # Red
    CRITICAL = ('CRITICAL', '#992d22')  # Dark Red


class Notifier:
    """
    Posts analysis findings and failures to a Discord webhook.

    Findings are networks whose cut-set bound exceeds twice the LP lower
    bound (a counterexample to the gap conjecture); failures are verification
    or simulation errors. Without a webhook the notifier only logs.
    """

    def __init__(self, webhook_url: Optional[str] = None):
        self.webhook_url = webhook_url or get_settings().discord_webhook_url
        if not self.webhook_url:
            logger.debug("DISCORD_WEBHOOK_URL not set. Notifier will be disabled.")

    @property
    def enabled(self) -> bool:
        return bool(self.webhook_url)

    def send(self, message: str, severity: Severity = Severity.INFO, title: str = "All-Reduce Bounds") -> bool:
        """
        Sends one embed to the webhook.

        Returns:
            bool: True if the message was delivered, False if disabled or the request failed.
        """
        if not self.enabled:
            logger.info(f"Notifier is disabled. Message not sent: {message}")
            return False

        level_name, color = severity.value
        payload = {
            "embeds": [
                {
                    "title": title,
                    "description": message,
                    "color": int(color.replace('#', ''), 16),
                    "fields": [{"name": "Severity", "value": level_name, "inline": True}],
                }
            ]
        }

        try:
            response = requests.post(self.webhook_url, json=payload, timeout=10)
            response.raise_for_status()
            logger.info(f"Sent {severity.name} notification.")
            return True
        except requests.exceptions.RequestException as e:
            logger.error(f"Failed to send notification: {e}")
            return False

    def report_finding(self, descriptor: str, lower: Fraction, upper: Rational) -> bool:
        ratio = Fraction(upper) / lower
        message = (f"{descriptor}: cut-set bound {upper} exceeds twice the LP bound {lower} "
                   f"(ratio {ratio}).")
        logger.warning(f"FINDING: {message}")
        return self.send(message, Severity.WARNING, title="Gap conjecture counterexample")

    def report_failure(self, context: str, error: Exception) -> bool:
        message = f"{context}: {type(error).__name__}: {error}"
        logger.critical(message)
        return self.send(message, Severity.CRITICAL, title="Verification failure")
