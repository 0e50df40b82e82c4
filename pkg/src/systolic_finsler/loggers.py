import logging

logger = logging.getLogger("systolic_finsler")
